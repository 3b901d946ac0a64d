#pragma once

#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "ctrltpl/poly.hpp"

namespace ctrltpl {

// State-affine system  xdot = A(u) x + b(u),  y = C(u) x  with A, C, b
// polynomial in the control u in R^p.
class StateAffineSystem {
  public:
    StateAffineSystem(PolyMatrix a, PolyMatrix c, std::vector<MultiPoly> b);

    int n() const { return n_; }
    int m() const { return m_; }
    int p() const { return p_; }

    const PolyMatrix& a_poly() const { return a_; }
    const PolyMatrix& c_poly() const { return c_; }
    const std::vector<MultiPoly>& b_poly() const { return b_; }

    Eigen::MatrixXd a(const Eigen::VectorXd& u) const { return a_.eval(u); }
    Eigen::MatrixXd c(const Eigen::VectorXd& u) const { return c_.eval(u); }
    Eigen::VectorXd b(const Eigen::VectorXd& u) const;

    int deg_a() const;  // 0 for a constant (or zero) matrix
    int deg_c() const;
    // n*deg C + n(n-1)/2 * deg A, the minor-determinant degree bound.
    int minor_degree_bound() const;

  private:
    PolyMatrix a_, c_;
    std::vector<MultiPoly> b_;
    int n_, m_, p_;
};

// Piecewise-constant input on [breakpoints.front(), breakpoints.back()]:
// level k holds on [s_k, s_{k+1}), the last level also at the right end.
class InputSignal {
  public:
    InputSignal(std::vector<double> breakpoints, std::vector<Eigen::VectorXd> levels);

    static InputSignal constant(const Eigen::VectorXd& level, double t_end, double t_begin = 0.0);

    int dims() const { return static_cast<int>(levels_.front().size()); }
    int piece_count() const { return static_cast<int>(levels_.size()); }
    double t_begin() const { return breakpoints_.front(); }
    double t_end() const { return breakpoints_.back(); }
    const std::vector<double>& breakpoints() const { return breakpoints_; }
    const std::vector<Eigen::VectorXd>& levels() const { return levels_; }

    const Eigen::VectorXd& value(double s) const;

    // Largest deviation of any level from the first one.
    double max_deviation_from_start() const;

  private:
    std::vector<double> breakpoints_;
    std::vector<Eigen::VectorXd> levels_;
};

// Invokes fn(level, a, b) on each maximal constant piece of u intersected
// with [s, t]; requires s < t inside the signal domain.
void for_each_piece(const InputSignal& u, double s, double t,
                    const std::function<void(const Eigen::VectorXd&, double, double)>& fn);

// Stacked blocks C(u), C(u)A(u), ..., C(u)A(u)^{n-1} as an (mn x n)
// polynomial matrix.
PolyMatrix kalman_matrix(const StateAffineSystem& sys);

struct MinorSelection {
    std::vector<int> row_indices;  // rows of the Kalman matrix, ascending
    MultiPoly det{1};              // determinant of the selected square block
    int degree_bound = 0;          // n*deg C + n(n-1)/2*deg A
};

// Selects n rows of the Kalman matrix that are independent at u = 0 (greedy
// scan in stack order, which keeps the selection downward-closed per output
// channel and hence inside the degree bound) and returns the symbolic
// determinant of that block. Throws ObservabilityError if rank at 0 is
// deficient.
MinorSelection find_full_rank_minor(const StateAffineSystem& sys);

inline constexpr int kDefaultSubsteps = 20;

// Transition matrix Phi_u(t, s) of  d/dt Phi = A(u(t)) Phi, Phi(s,s) = Id.
// Classical RK4 on a grid aligned with the signal breakpoints, `substeps`
// steps per constant piece; for t < s the forward matrix is inverted.
Eigen::MatrixXd transition_matrix(const StateAffineSystem& sys, const InputSignal& u, double s, double t,
                                  int substeps = kDefaultSubsteps);

// Backward observability Gramian over [s, t],
//   Gamma_u(t, s) = int_s^t Phi(tau,t)' C(u)'C(u) Phi(tau,t) dtau,
// computed by co-integrating Psi(tau) = Phi(tau, s) together with the
// accumulated quadratic form and conjugating by Psi(t)^{-1}.
Eigen::MatrixXd gramian(const StateAffineSystem& sys, const InputSignal& u, double s, double t,
                        int substeps = kDefaultSubsteps);

// True iff the Gramian of the constant input over [0, horizon] has smallest
// eigenvalue above tol.
bool observable_at(const StateAffineSystem& sys, const Eigen::VectorXd& u, double horizon, double tol,
                   int substeps = kDefaultSubsteps);

} // namespace ctrltpl
