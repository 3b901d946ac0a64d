#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "ctrltpl/errors.hpp"

namespace ctrltpl {

// Exponent multi-index of a monomial, one entry per control variable.
using Exponents = std::vector<int>;

// Graded lexicographic order: lower total degree first, ties broken
// lexicographically.
struct GradedLexLess {
    bool operator()(const Exponents& a, const Exponents& b) const;
};

// Sparse multivariate polynomial with real coefficients in a fixed number of
// variables. Kept in canonical form: no stored coefficient has magnitude
// below coeff_tolerance(), and all exponent vectors have length num_vars().
class MultiPoly {
  public:
    using TermMap = std::map<Exponents, double, GradedLexLess>;

    // Magnitude below which a coefficient is dropped during normalization.
    // Cancellation in sums and products otherwise leaves near-zero debris.
    static constexpr double coeff_tolerance() { return 1e-12; }

    explicit MultiPoly(int num_vars);
    MultiPoly(int num_vars, std::vector<std::pair<double, Exponents>> terms);

    static MultiPoly zero(int num_vars) { return MultiPoly(num_vars); }
    static MultiPoly constant(int num_vars, double value);
    // The monomial x_index (0-based).
    static MultiPoly variable(int num_vars, int index);

    int num_vars() const { return num_vars_; }
    const TermMap& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    // Coefficient of the given monomial (0 if absent).
    double coeff(const Exponents& e) const;

    // Total degree; std::nullopt is the "minus infinity" degree of the zero
    // polynomial.
    std::optional<int> degree() const;

    double eval(const Eigen::VectorXd& u) const;

    MultiPoly operator+(const MultiPoly& rhs) const;
    MultiPoly operator-(const MultiPoly& rhs) const;
    MultiPoly operator*(const MultiPoly& rhs) const;
    MultiPoly operator-() const;
    MultiPoly operator*(double scalar) const;

    // Substitutes a fixed value for one variable, producing a polynomial in
    // the remaining num_vars()-1 variables.
    MultiPoly substitute(int var_index, double value) const;

    std::string to_string() const;

  private:
    void add_term(const Exponents& e, double c);
    void prune();

    int num_vars_;
    TermMap terms_;
};

inline MultiPoly operator*(double scalar, const MultiPoly& p) { return p * scalar; }

MultiPoly poly_add(const MultiPoly& a, const MultiPoly& b);
MultiPoly poly_mul(const MultiPoly& a, const MultiPoly& b);
double poly_eval(const MultiPoly& p, const Eigen::VectorXd& u);
std::optional<int> poly_degree(const MultiPoly& p);

// Dense matrix of polynomials sharing one variable count.
class PolyMatrix {
  public:
    PolyMatrix(int rows, int cols, int num_vars);
    PolyMatrix(int rows, int cols, std::vector<MultiPoly> entries);

    static PolyMatrix identity(int n, int num_vars);
    // Lifts a numeric matrix to constant polynomial entries.
    static PolyMatrix from_constant(const Eigen::MatrixXd& m, int num_vars);

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    int num_vars() const { return num_vars_; }

    const MultiPoly& operator()(int r, int c) const;
    MultiPoly& operator()(int r, int c);

    PolyMatrix operator*(const PolyMatrix& rhs) const;

    Eigen::MatrixXd eval(const Eigen::VectorXd& u) const;

    // Maximum entry degree (nullopt for the zero matrix).
    std::optional<int> degree() const;

    // Submatrix with the given rows, all columns.
    PolyMatrix select_rows(const std::vector<int>& row_indices) const;

  private:
    int rows_, cols_, num_vars_;
    std::vector<MultiPoly> entries_;
};

// Determinant by cofactor expansion with memoized minors. Capped at 6x6:
// observability matrices at desk scale stay small, and the subset
// memoization is exponential in the size.
inline constexpr int kDetSizeLimit = 6;
MultiPoly polymat_det(const PolyMatrix& m);

} // namespace ctrltpl
