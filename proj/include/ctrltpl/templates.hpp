#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ctrltpl/system.hpp"

namespace ctrltpl {

enum class TemplateKind { kSiso, kGenpos, kSquare, kExplicit };

std::string to_string(TemplateKind kind);

// Delta-indexed family of piecewise-constant inputs on [0, Delta]: level k
// equals v_0 + Delta (v_k - v_0) on [k Delta/N, (k+1) Delta/N) where the v_k
// are the stored points and v_0 = (1, 0, ..., 0). Deviation from the start
// value is bounded by the linear class-K function
// kappa(Delta) = Delta * max_k |v_k - v_0|.
class TemplateFamily {
  public:
    TemplateFamily(TemplateKind kind, std::vector<Eigen::VectorXd> points, double t_max = 1.0);

    // Scalar levels 1 + k/N, the staircase family of the SISO construction.
    static TemplateFamily siso(int levels, double t_max = 1.0);
    // Square vertices (1,0), (1,1), (2,1), (2,0).
    static TemplateFamily square(double t_max = 1.0);
    // Normalized points of a (d, p)-general position construction.
    static TemplateFamily from_general_position(int d, int p, const std::vector<double>& anchors,
                                                double t_max = 1.0);
    static TemplateFamily explicit_points(std::vector<Eigen::VectorXd> points, double t_max = 1.0);

    TemplateKind kind() const { return kind_; }
    int level_count() const { return static_cast<int>(points_.size()); }
    int dims() const { return static_cast<int>(points_.front().size()); }
    double t_max() const { return t_max_; }
    const std::vector<Eigen::VectorXd>& points() const { return points_; }

    // Linear deviation bound kappa(Delta).
    double kappa(double delta) const;

    InputSignal signal(double delta) const;

  private:
    TemplateKind kind_;
    std::vector<Eigen::VectorXd> points_;
    double t_max_;
};

// Staircase input v(s) = 1 + Delta/N * floor(N s / Delta) on [0, Delta].
InputSignal siso_template(double delta, int levels);

// Input with level v_0 + Delta (v_k - v_0) on the k-th of N = card(points)
// equal subintervals; points[0] must equal (1, 0, ..., 0).
InputSignal mimo_template(double delta, const std::vector<Eigen::VectorXd>& points);

// Replaces every level u_k by mu * R * u_k; R must be orthogonal.
InputSignal scaled_rotated(const InputSignal& v, double mu, const Eigen::MatrixXd& rotation);

struct TemplateCertificate {
    double delta = 0.0;
    double lambda_bar = 0.0;
    int mu_grid = 0;
    int rot_grid = 0;
    std::uint64_t seed = 0;
    std::string grid_description;
    // Smallest lambda_min(Gamma_{mu R v}(Delta, 0)) over the sampled grid; an
    // empirical lower-bound estimate, not a proof.
    double g_estimate = 0.0;
    double worst_mu = 0.0;
    Eigen::MatrixXd worst_rotation;
};

// Samples of O(p): exact {-1, +1} for p = 1; `count` equispaced rotation
// angles crossed with {identity, axis reflection} for p = 2; `count` seeded
// orthonormalized Gaussian matrices for p >= 3.
std::vector<Eigen::MatrixXd> orthogonal_samples(int p, int count, std::uint64_t seed);

// Evaluates lambda_min(Gamma_{mu R v_Delta}(Delta, 0)) over
// mu in {0, lambda_bar/mu_grid, ..., lambda_bar} times the orthogonal sample
// set and reports the minimum with its argmin.
TemplateCertificate certify_template(const StateAffineSystem& sys, const TemplateFamily& family, double delta,
                                     double lambda_bar, int mu_grid, int rot_grid, std::uint64_t seed,
                                     int substeps = kDefaultSubsteps);

} // namespace ctrltpl
