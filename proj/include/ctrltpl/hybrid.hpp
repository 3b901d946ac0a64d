#pragma once

#include <functional>
#include <optional>
#include <ostream>
#include <vector>

#include <Eigen/Dense>

#include "ctrltpl/observer.hpp"
#include "ctrltpl/templates.hpp"

namespace ctrltpl {

// Radial clamp of x to the ball of radius rho; identity when rho is absent
// or |x| <= rho.
Eigen::VectorXd saturate(const Eigen::VectorXd& x, std::optional<double> rho);

// A member of R(v) = { R orthogonal : R (|v|, 0, ..., 0)' = v }: the
// reflection mapping e1 to v/|v| (identity when they coincide, and for
// v = 0, where any orthogonal matrix qualifies).
Eigen::MatrixXd rotation_to(const Eigen::VectorXd& v);

// Feedback law with lambda(0) = 0, optionally applied through a radial
// saturation.
class FeedbackLaw {
  public:
    using Callable = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

    static FeedbackLaw linear(const Eigen::MatrixXd& gain, std::optional<double> saturation_radius = std::nullopt);
    // The callable must vanish at the origin (checked at construction).
    static FeedbackLaw custom(Callable fn, int state_dim, int input_dim,
                              std::optional<double> saturation_radius = std::nullopt);

    int state_dim() const { return state_dim_; }
    int input_dim() const { return input_dim_; }
    std::optional<double> saturation_radius() const { return saturation_radius_; }
    const std::optional<Eigen::MatrixXd>& gain() const { return gain_; }

    // lambda(sat(x)).
    Eigen::VectorXd operator()(const Eigen::VectorXd& x) const;

  private:
    FeedbackLaw(Callable fn, int state_dim, int input_dim, std::optional<double> sat,
                std::optional<Eigen::MatrixXd> gain);

    Callable fn_;
    int state_dim_, input_dim_;
    std::optional<double> saturation_radius_;
    std::optional<Eigen::MatrixXd> gain_;
};

// Full state of the hybrid closed loop.
struct LoopState {
    Eigen::VectorXd x;
    Eigen::VectorXd xhat;
    Eigen::MatrixXd s_gain;   // observer gain S, SPD
    double timer = 0.0;       // s in [0, Delta]
    double mu = 0.0;
    Eigen::MatrixXd rotation; // p x p orthogonal
    long jump_count = 0;
};

// Jump map: x, xhat, S unchanged; timer resets; mu and R realign the next
// template period with the current feedback value.
LoopState jump(const LoopState& state, const FeedbackLaw& feedback);

struct TrajectorySample {
    double t = 0.0;
    long j = 0;
    LoopState state;
    Eigen::VectorXd err;  // xhat - x, integrated directly
    Eigen::VectorXd u;
};

struct HybridTrajectory {
    std::vector<TrajectorySample> samples;
    std::vector<double> jump_times;  // tau_i = Delta - s(0) + i Delta
};

// Simulates the hybrid closed loop: flow of (x, xhat, S, timer) with frozen
// (mu, R) and input u = mu R v_Delta(timer), jumps whenever the timer
// reaches Delta. The grid is aligned with the template breakpoints
// (`substeps` RK4 steps per constant piece), so jumps land exactly on grid
// nodes. The observer error xhat - x is integrated as its own variable; its
// affine terms cancel exactly, which keeps the recorded error meaningful far
// below the cancellation floor of the difference of two trajectories.
HybridTrajectory simulate(const StateAffineSystem& sys, const TemplateFamily& family, const FeedbackLaw& feedback,
                          double theta, double delta, const LoopState& init, double t_final,
                          int substeps = kDefaultSubsteps);

// CSV export, one row per grid sample:
// t, j, x_1..x_n, xhat_1..xhat_n, err_norm, log10_err_norm, u_1..u_p,
// s_timer, mu, S_min_eig, S_max_eig. 17 significant digits.
void write_trajectory_csv(const HybridTrajectory& trajectory, std::ostream& os);

} // namespace ctrltpl
