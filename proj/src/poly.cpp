#include "ctrltpl/poly.hpp"

#include <cmath>
#include <cstdint>
#include <numeric>
#include <sstream>

namespace ctrltpl {

bool GradedLexLess::operator()(const Exponents& a, const Exponents& b) const {
    const int da = std::accumulate(a.begin(), a.end(), 0);
    const int db = std::accumulate(b.begin(), b.end(), 0);
    if (da != db)
        return da < db;
    return a < b;
}

MultiPoly::MultiPoly(int num_vars) : num_vars_(num_vars) {
    if (num_vars <= 0)
        throw DimensionError("MultiPoly: num_vars must be positive, got " + std::to_string(num_vars));
}

MultiPoly::MultiPoly(int num_vars, std::vector<std::pair<double, Exponents>> terms) : MultiPoly(num_vars) {
    for (const auto& [c, e] : terms) {
        if (static_cast<int>(e.size()) != num_vars_)
            throw DimensionError("MultiPoly: exponent vector of length " + std::to_string(e.size()) +
                                 " in a polynomial with " + std::to_string(num_vars_) + " variables");
        for (int k : e)
            if (k < 0)
                throw ValidationError("MultiPoly: negative exponent " + std::to_string(k));
        add_term(e, c);
    }
    prune();
}

MultiPoly MultiPoly::constant(int num_vars, double value) {
    MultiPoly p(num_vars);
    p.add_term(Exponents(num_vars, 0), value);
    p.prune();
    return p;
}

MultiPoly MultiPoly::variable(int num_vars, int index) {
    if (index < 0 || index >= num_vars)
        throw DimensionError("MultiPoly::variable: index " + std::to_string(index) + " out of range");
    MultiPoly p(num_vars);
    Exponents e(num_vars, 0);
    e[index] = 1;
    p.add_term(e, 1.0);
    return p;
}

double MultiPoly::coeff(const Exponents& e) const {
    auto it = terms_.find(e);
    return it == terms_.end() ? 0.0 : it->second;
}

std::optional<int> MultiPoly::degree() const {
    if (terms_.empty())
        return std::nullopt;
    // Graded order: the last term carries the maximal total degree.
    const Exponents& e = terms_.rbegin()->first;
    return std::accumulate(e.begin(), e.end(), 0);
}

double MultiPoly::eval(const Eigen::VectorXd& u) const {
    if (u.size() != num_vars_)
        throw DimensionError("MultiPoly::eval: point of length " + std::to_string(u.size()) +
                             " for a polynomial in " + std::to_string(num_vars_) + " variables");
    double acc = 0.0;
    for (const auto& [e, c] : terms_) {
        double mono = c;
        for (int i = 0; i < num_vars_; ++i)
            for (int k = 0; k < e[i]; ++k)
                mono *= u[i];
        acc += mono;
    }
    return acc;
}

MultiPoly MultiPoly::operator+(const MultiPoly& rhs) const {
    if (rhs.num_vars_ != num_vars_)
        throw DimensionError("poly_add: operands in " + std::to_string(num_vars_) + " and " +
                             std::to_string(rhs.num_vars_) + " variables");
    MultiPoly out = *this;
    for (const auto& [e, c] : rhs.terms_)
        out.add_term(e, c);
    out.prune();
    return out;
}

MultiPoly MultiPoly::operator-(const MultiPoly& rhs) const { return *this + (-rhs); }

MultiPoly MultiPoly::operator-() const {
    MultiPoly out = *this;
    for (auto& [e, c] : out.terms_)
        c = -c;
    return out;
}

MultiPoly MultiPoly::operator*(double scalar) const {
    MultiPoly out = *this;
    for (auto& [e, c] : out.terms_)
        c *= scalar;
    out.prune();
    return out;
}

MultiPoly MultiPoly::operator*(const MultiPoly& rhs) const {
    if (rhs.num_vars_ != num_vars_)
        throw DimensionError("poly_mul: operands in " + std::to_string(num_vars_) + " and " +
                             std::to_string(rhs.num_vars_) + " variables");
    MultiPoly out(num_vars_);
    Exponents e(num_vars_);
    for (const auto& [ea, ca] : terms_) {
        for (const auto& [eb, cb] : rhs.terms_) {
            for (int i = 0; i < num_vars_; ++i)
                e[i] = ea[i] + eb[i];
            out.add_term(e, ca * cb);
        }
    }
    out.prune();
    return out;
}

MultiPoly MultiPoly::substitute(int var_index, double value) const {
    if (var_index < 0 || var_index >= num_vars_)
        throw DimensionError("MultiPoly::substitute: variable index out of range");
    if (num_vars_ == 1) {
        // Fully evaluated: report as a constant in one variable.
        MultiPoly out(1);
        Eigen::VectorXd u(1);
        u[0] = value;
        out.add_term(Exponents(1, 0), eval(u));
        out.prune();
        return out;
    }
    MultiPoly out(num_vars_ - 1);
    for (const auto& [e, c] : terms_) {
        double factor = c;
        for (int k = 0; k < e[var_index]; ++k)
            factor *= value;
        Exponents reduced;
        reduced.reserve(num_vars_ - 1);
        for (int i = 0; i < num_vars_; ++i)
            if (i != var_index)
                reduced.push_back(e[i]);
        out.add_term(reduced, factor);
    }
    out.prune();
    return out;
}

std::string MultiPoly::to_string() const {
    if (terms_.empty())
        return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [e, c] : terms_) {
        if (!first)
            os << (c >= 0 ? " + " : " - ");
        else if (c < 0)
            os << "-";
        os << std::abs(c);
        for (int i = 0; i < num_vars_; ++i) {
            if (e[i] == 0)
                continue;
            os << "*u" << (i + 1);
            if (e[i] > 1)
                os << "^" << e[i];
        }
        first = false;
    }
    return os.str();
}

void MultiPoly::add_term(const Exponents& e, double c) {
    auto [it, inserted] = terms_.try_emplace(e, c);
    if (!inserted)
        it->second += c;
}

void MultiPoly::prune() {
    for (auto it = terms_.begin(); it != terms_.end();) {
        if (std::abs(it->second) <= coeff_tolerance())
            it = terms_.erase(it);
        else
            ++it;
    }
}

MultiPoly poly_add(const MultiPoly& a, const MultiPoly& b) { return a + b; }
MultiPoly poly_mul(const MultiPoly& a, const MultiPoly& b) { return a * b; }
double poly_eval(const MultiPoly& p, const Eigen::VectorXd& u) { return p.eval(u); }
std::optional<int> poly_degree(const MultiPoly& p) { return p.degree(); }

PolyMatrix::PolyMatrix(int rows, int cols, int num_vars)
    : rows_(rows), cols_(cols), num_vars_(num_vars), entries_(static_cast<size_t>(rows) * cols, MultiPoly(num_vars)) {
    if (rows <= 0 || cols <= 0)
        throw DimensionError("PolyMatrix: non-positive shape");
}

PolyMatrix::PolyMatrix(int rows, int cols, std::vector<MultiPoly> entries)
    : rows_(rows), cols_(cols), num_vars_(entries.empty() ? 1 : entries.front().num_vars()),
      entries_(std::move(entries)) {
    if (rows <= 0 || cols <= 0)
        throw DimensionError("PolyMatrix: non-positive shape");
    if (entries_.size() != static_cast<size_t>(rows) * cols)
        throw DimensionError("PolyMatrix: " + std::to_string(entries_.size()) + " entries for a " +
                             std::to_string(rows) + "x" + std::to_string(cols) + " matrix");
    for (const auto& p : entries_)
        if (p.num_vars() != num_vars_)
            throw DimensionError("PolyMatrix: entries disagree on the number of variables");
}

PolyMatrix PolyMatrix::identity(int n, int num_vars) {
    PolyMatrix m(n, n, num_vars);
    for (int i = 0; i < n; ++i)
        m(i, i) = MultiPoly::constant(num_vars, 1.0);
    return m;
}

PolyMatrix PolyMatrix::from_constant(const Eigen::MatrixXd& src, int num_vars) {
    PolyMatrix m(static_cast<int>(src.rows()), static_cast<int>(src.cols()), num_vars);
    for (int r = 0; r < src.rows(); ++r)
        for (int c = 0; c < src.cols(); ++c)
            m(r, c) = MultiPoly::constant(num_vars, src(r, c));
    return m;
}

const MultiPoly& PolyMatrix::operator()(int r, int c) const {
    return entries_[static_cast<size_t>(r) * cols_ + c];
}

MultiPoly& PolyMatrix::operator()(int r, int c) { return entries_[static_cast<size_t>(r) * cols_ + c]; }

PolyMatrix PolyMatrix::operator*(const PolyMatrix& rhs) const {
    if (cols_ != rhs.rows_)
        throw DimensionError("PolyMatrix: product of " + std::to_string(rows_) + "x" + std::to_string(cols_) +
                             " and " + std::to_string(rhs.rows_) + "x" + std::to_string(rhs.cols_));
    if (num_vars_ != rhs.num_vars_)
        throw DimensionError("PolyMatrix: product operands disagree on the number of variables");
    PolyMatrix out(rows_, rhs.cols_, num_vars_);
    for (int i = 0; i < rows_; ++i)
        for (int j = 0; j < rhs.cols_; ++j) {
            MultiPoly acc(num_vars_);
            for (int k = 0; k < cols_; ++k)
                acc = acc + (*this)(i, k) * rhs(k, j);
            out(i, j) = acc;
        }
    return out;
}

Eigen::MatrixXd PolyMatrix::eval(const Eigen::VectorXd& u) const {
    Eigen::MatrixXd out(rows_, cols_);
    for (int r = 0; r < rows_; ++r)
        for (int c = 0; c < cols_; ++c)
            out(r, c) = (*this)(r, c).eval(u);
    return out;
}

std::optional<int> PolyMatrix::degree() const {
    std::optional<int> d;
    for (const auto& p : entries_) {
        auto dp = p.degree();
        if (dp && (!d || *dp > *d))
            d = dp;
    }
    return d;
}

PolyMatrix PolyMatrix::select_rows(const std::vector<int>& row_indices) const {
    std::vector<MultiPoly> sel;
    sel.reserve(row_indices.size() * cols_);
    for (int r : row_indices) {
        if (r < 0 || r >= rows_)
            throw DimensionError("PolyMatrix::select_rows: row index " + std::to_string(r) + " out of range");
        for (int c = 0; c < cols_; ++c)
            sel.push_back((*this)(r, c));
    }
    return PolyMatrix(static_cast<int>(row_indices.size()), cols_, std::move(sel));
}

namespace {

// Minor over rows [row..n) and the column set encoded in `mask`, memoized by
// mask. Rows are consumed in order, so the mask determines the minor.
MultiPoly det_minor(const PolyMatrix& m, int row, std::uint32_t mask, std::vector<std::optional<MultiPoly>>& memo) {
    const int n = m.rows();
    if (row == n)
        return MultiPoly::constant(m.num_vars(), 1.0);
    if (memo[mask])
        return *memo[mask];
    MultiPoly acc(m.num_vars());
    int sign = 1;
    for (int c = 0; c < n; ++c) {
        if (!(mask & (1u << c)))
            continue;
        const MultiPoly& piv = m(row, c);
        if (!piv.is_zero()) {
            MultiPoly sub = det_minor(m, row + 1, mask & ~(1u << c), memo);
            acc = acc + (sign > 0 ? piv * sub : -(piv * sub));
        }
        sign = -sign;
    }
    memo[mask] = acc;
    return acc;
}

} // namespace

MultiPoly polymat_det(const PolyMatrix& m) {
    if (m.rows() != m.cols())
        throw DimensionError("polymat_det: matrix is " + std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
    if (m.rows() > kDetSizeLimit)
        throw SizeLimitError("polymat_det: size " + std::to_string(m.rows()) + " exceeds the cofactor budget of " +
                             std::to_string(kDetSizeLimit));
    const std::uint32_t full = (1u << m.rows()) - 1u;
    std::vector<std::optional<MultiPoly>> memo(full + 1);
    return det_minor(m, 0, full, memo);
}

} // namespace ctrltpl
