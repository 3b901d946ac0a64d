#pragma once

#include <vector>

#include <Eigen/Dense>

#include "ctrltpl/system.hpp"

namespace ctrltpl {

// Kalman-like observer state: estimate xhat and symmetric positive-definite
// gain matrix S. S stays positive-definite along flows started
// positive-definite.
struct ObserverState {
    Eigen::VectorXd xhat;
    Eigen::MatrixXd s;
};

struct ObserverRhs {
    Eigen::VectorXd dxhat;
    Eigen::MatrixXd ds;  // exactly symmetric
};

// S^{-1} rhs through a symmetric factorization, guarding against a
// numerically singular gain (condition estimate above 1e14).
Eigen::VectorXd gain_solve(const Eigen::MatrixXd& s, const Eigen::VectorXd& rhs);

// Right-hand side -A'S - SA - theta S + C'C of the gain equation,
// symmetrized exactly.
Eigen::MatrixXd gain_equation_rhs(const Eigen::MatrixXd& a, const Eigen::MatrixXd& ctc, double theta,
                                  const Eigen::MatrixXd& s);

// Right-hand side of the observer ODEs
//   dxhat = A(u) xhat + b(u) - S^{-1} C(u)'(C(u) xhat - y)
//   dS    = -A(u)'S - S A(u) - theta S + C(u)'C(u)
// Throws GainSingularityError when S is numerically singular.
ObserverRhs observer_rhs(const StateAffineSystem& sys, const Eigen::VectorXd& u, const ObserverState& state,
                         const Eigen::VectorXd& y, double theta);

// Unique solution of  A(0)'S + S A(0) + theta S = C(0)'C(0)  by Kronecker
// vectorization. Requires theta >= 2 ||A(0)||_2 so the shifted dynamics is
// stable and the solution positive-definite.
Eigen::MatrixXd steady_state_gain(const StateAffineSystem& sys, double theta);

// Flow of the gain equation dS = -A'S - SA - theta S + C'C under the signal
// u from t0 to t (RK4 on the breakpoint-aligned grid, symmetrized each
// step).
Eigen::MatrixXd integrate_gain(const StateAffineSystem& sys, const InputSignal& u, const Eigen::MatrixXd& s0,
                               double theta, double t0, double t, int substeps = kDefaultSubsteps);

// Independent oracle for the gain flow: the variation-of-constants formula
//   S(t) = e^{-theta(t-t0)} Phi(t0,t)' S0 Phi(t0,t)
//        + int_{t0}^t e^{-theta(t-tau)} Phi(tau,t)' C'C Phi(tau,t) dtau
// with the integral evaluated by composite Simpson quadrature on a half-step
// refinement of the integration grid.
Eigen::MatrixXd variation_of_constants_S(const StateAffineSystem& sys, const InputSignal& u,
                                         const Eigen::MatrixXd& s0, double theta, double t0, double t,
                                         int substeps = kDefaultSubsteps);

// e^{-theta (t1 - t0)} lambda_min(Gamma_u(t1, t0)): a floor for the smallest
// eigenvalue of S at t along any flow started positive-definite at t0.
double smin_lower_bound(const StateAffineSystem& sys, const InputSignal& u, double theta, double t0, double t1,
                        double t, int substeps = kDefaultSubsteps);

// Open-loop co-simulation of plant and observer driven by the signal u over
// its full domain, with exact outputs y = C(u) x. The observer error is
// integrated as its own variable (its affine terms cancel exactly), so error
// decay is resolved far below the cancellation floor of xhat - x.
struct ObserverRunSample {
    double t = 0.0;
    Eigen::VectorXd x;
    Eigen::VectorXd xhat;
    Eigen::MatrixXd s;
};

std::vector<ObserverRunSample> simulate_observer(const StateAffineSystem& sys, const InputSignal& u,
                                                 const Eigen::VectorXd& x0, const Eigen::VectorXd& xhat0,
                                                 const Eigen::MatrixXd& s0, double theta,
                                                 int substeps = kDefaultSubsteps);

} // namespace ctrltpl
