#pragma once

#include <vector>

#include <Eigen/Dense>

#include "ctrltpl/errors.hpp"

namespace ctrltpl {

// Minimal point set in (d, p)-general position: no nonzero p-variate
// polynomial of degree <= d vanishes on all points. Built from p+d distinct
// anchor reals, one point per size-p anchor subset.
struct GeneralPositionSet {
    int d = 0;
    int p = 1;
    std::vector<double> anchors;          // p + d distinct reals
    std::vector<Eigen::VectorXd> points;  // C(p+d, p) points in R^p
};

struct GeneralPositionCertificate {
    int rank = 0;
    double min_singular_value = 0.0;
    bool general_position = false;  // rank equals the number of monomials of degree <= d
    bool minimal = false;           // dropping any single point breaks general position
};

// Multi-indices xi in N^p with |xi| <= d, in a fixed deterministic order.
std::vector<std::vector<int>> monomial_exponents(int p, int d);

// C(n, k) as a long integer (small arguments only).
long long binomial(int n, int k);

// Coefficients (v_1, ..., v_p) of the monic polynomial
// T^p + v_1 T^{p-1} + ... + v_p with the given roots.
Eigen::VectorXd coeffs_from_roots(const std::vector<double>& roots);

// One point per size-p subset of the anchors, via coeffs_from_roots.
// Anchors must be pairwise distinct (separation 1e-9).
GeneralPositionSet build_general_position(int d, int p, const std::vector<double>& anchors);

// Numeric rank certificate of the monomial evaluation matrix V = (v^xi),
// rows indexed by monomials of degree <= d, columns by points. Threshold is
// 1e-9 relative to the largest singular value.
GeneralPositionCertificate verify_general_position(int d, int p, const std::vector<Eigen::VectorXd>& points);
GeneralPositionCertificate verify_general_position(const GeneralPositionSet& set);

// Translates the set so points[0] lands on (1, 0, ..., 0); the general
// position property is affine-invariant. Requires a verified set.
std::vector<Eigen::VectorXd> normalize_to_template_origin(const GeneralPositionSet& set);

} // namespace ctrltpl
