#pragma once

#include <random>
#include <vector>

#include <Eigen/Dense>

#include "ctrltpl/system.hpp"

namespace testutil {

using ctrltpl::Exponents;
using ctrltpl::InputSignal;
using ctrltpl::MultiPoly;
using ctrltpl::PolyMatrix;
using ctrltpl::StateAffineSystem;

// The 2-input 1-output 3-state benchmark system:
//   A(u) = [[-0.5-u1, 1.5+u2, 4], [4.3, 6, 5], [3.2, 6.8, 7.2]]
//   b(u) = u1 (-0.7, 0, 0.8)' - u2 (1.3, 4.3, 1.5)'
//   C    = [1, -0.5, 0.5]
inline StateAffineSystem benchmark_system() {
    const int p = 2;
    PolyMatrix a(3, 3, p);
    a(0, 0) = MultiPoly(p, {{-0.5, {0, 0}}, {-1.0, {1, 0}}});
    a(0, 1) = MultiPoly(p, {{1.5, {0, 0}}, {1.0, {0, 1}}});
    a(0, 2) = MultiPoly::constant(p, 4.0);
    a(1, 0) = MultiPoly::constant(p, 4.3);
    a(1, 1) = MultiPoly::constant(p, 6.0);
    a(1, 2) = MultiPoly::constant(p, 5.0);
    a(2, 0) = MultiPoly::constant(p, 3.2);
    a(2, 1) = MultiPoly::constant(p, 6.8);
    a(2, 2) = MultiPoly::constant(p, 7.2);
    PolyMatrix c(1, 3, p);
    c(0, 0) = MultiPoly::constant(p, 1.0);
    c(0, 1) = MultiPoly::constant(p, -0.5);
    c(0, 2) = MultiPoly::constant(p, 0.5);
    std::vector<MultiPoly> b{
        MultiPoly(p, {{-0.7, {1, 0}}, {-1.3, {0, 1}}}),
        MultiPoly(p, {{-4.3, {0, 1}}}),
        MultiPoly(p, {{0.8, {1, 0}}, {-1.5, {0, 1}}}),
    };
    return StateAffineSystem(std::move(a), std::move(c), std::move(b));
}

inline Eigen::MatrixXd benchmark_feedback_gain() {
    Eigen::MatrixXd k(2, 3);
    k << 0.038, 0.1751, -0.8551, 3.8514, 3.84, 9.551;
    return k;
}

// Exact expansion of det O(u) for the benchmark system, derived by symbolic
// cofactor expansion with rational arithmetic and cross-checked below by
// numeric LU determinants:
//   det O(u) = -3/4 u1^2 - 33/8 u1 u2 + 57/20 u2^2
//              - 183/4 u1 - 1041/160 u2 - 89637/320.
inline MultiPoly benchmark_det_oracle() {
    return MultiPoly(2, {
                            {-89637.0 / 320.0, {0, 0}},
                            {-183.0 / 4.0, {1, 0}},
                            {-1041.0 / 160.0, {0, 1}},
                            {-3.0 / 4.0, {2, 0}},
                            {-33.0 / 8.0, {1, 1}},
                            {57.0 / 20.0, {0, 2}},
                        });
}

// Scalar-input two-state system with det O(u) = u - 1: observable at u = 0,
// unobservable exactly at u = 1.
//   A(u) = [[0, u], [1, 0]], C = [1, 1], b = 0.
inline StateAffineSystem scalar_input_system() {
    PolyMatrix a(2, 2, 1);
    a(0, 1) = MultiPoly::variable(1, 0);
    a(1, 0) = MultiPoly::constant(1, 1.0);
    PolyMatrix c(1, 2, 1);
    c(0, 0) = MultiPoly::constant(1, 1.0);
    c(0, 1) = MultiPoly::constant(1, 1.0);
    return StateAffineSystem(std::move(a), std::move(c), {MultiPoly(1), MultiPoly(1)});
}

// Double integrator chain A = [[0,1],[0,0]], C = [1,0] lifted to `p` control
// variables (the matrices do not depend on u).
inline StateAffineSystem chain_system(int p = 1) {
    PolyMatrix a(2, 2, p);
    a(0, 1) = MultiPoly::constant(p, 1.0);
    PolyMatrix c(1, 2, p);
    c(0, 0) = MultiPoly::constant(p, 1.0);
    return StateAffineSystem(std::move(a), std::move(c), {MultiPoly(p), MultiPoly(p)});
}

inline MultiPoly random_poly(std::mt19937_64& rng, int num_vars, int max_degree, int max_terms = 4) {
    std::uniform_real_distribution<double> coeff(-1.0, 1.0);
    std::uniform_int_distribution<int> nterms(1, max_terms);
    std::uniform_int_distribution<int> expo(0, max_degree);
    std::vector<std::pair<double, Exponents>> terms;
    const int count = nterms(rng);
    for (int t = 0; t < count; ++t) {
        Exponents e(num_vars);
        int budget = max_degree;
        for (int i = 0; i < num_vars; ++i) {
            e[i] = std::min(budget, expo(rng));
            budget -= e[i];
        }
        terms.emplace_back(coeff(rng), e);
    }
    return MultiPoly(num_vars, std::move(terms));
}

// Random state-affine system with entries affine in u.
inline StateAffineSystem random_system(std::mt19937_64& rng, int n, int m, int p) {
    PolyMatrix a(n, n, p);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c)
            a(r, c) = random_poly(rng, p, 1, 2);
    PolyMatrix c(m, n, p);
    for (int r = 0; r < m; ++r)
        for (int col = 0; col < n; ++col)
            c(r, col) = random_poly(rng, p, 1, 2);
    std::vector<MultiPoly> b;
    for (int i = 0; i < n; ++i)
        b.push_back(random_poly(rng, p, 1, 2));
    return StateAffineSystem(std::move(a), std::move(c), std::move(b));
}

// Piecewise-constant signal with `pieces` equal pieces on [0, t_end].
inline InputSignal random_signal(std::mt19937_64& rng, int p, int pieces, double t_end) {
    std::uniform_real_distribution<double> level(-1.0, 1.0);
    std::vector<double> bp;
    std::vector<Eigen::VectorXd> lv;
    for (int k = 0; k < pieces; ++k) {
        bp.push_back(t_end * k / pieces);
        Eigen::VectorXd u(p);
        for (int i = 0; i < p; ++i)
            u[i] = level(rng);
        lv.push_back(u);
    }
    bp.push_back(t_end);
    return InputSignal(std::move(bp), std::move(lv));
}

inline Eigen::VectorXd random_vector(std::mt19937_64& rng, int n, double scale = 1.0) {
    std::uniform_real_distribution<double> dist(-scale, scale);
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i)
        v[i] = dist(rng);
    return v;
}

inline Eigen::MatrixXd random_spd(std::mt19937_64& rng, int n) {
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    Eigen::MatrixXd g(n, n);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c)
            g(r, c) = dist(rng);
    return g * g.transpose() + Eigen::MatrixXd::Identity(n, n);
}

// Matrix exponential by scaling-and-squaring of a truncated series; the
// independent oracle for constant-coefficient transition matrices.
inline Eigen::MatrixXd expm_oracle(const Eigen::MatrixXd& a) {
    int squarings = 0;
    double norm = a.norm();
    while (norm > 0.5) {
        norm /= 2.0;
        ++squarings;
    }
    const Eigen::MatrixXd scaled = a / std::pow(2.0, squarings);
    Eigen::MatrixXd term = Eigen::MatrixXd::Identity(a.rows(), a.cols());
    Eigen::MatrixXd sum = term;
    for (int k = 1; k <= 24; ++k) {
        term = term * scaled / static_cast<double>(k);
        sum += term;
    }
    for (int k = 0; k < squarings; ++k)
        sum = sum * sum;
    return sum;
}

inline double rel_err(double got, double want) {
    return std::abs(got - want) / std::max(1.0, std::abs(want));
}

inline double rel_err(const Eigen::MatrixXd& got, const Eigen::MatrixXd& want) {
    return (got - want).norm() / std::max(1.0, want.norm());
}

} // namespace testutil
