#include "ctrltpl/genpos.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace ctrltpl {

namespace {

constexpr double kAnchorSeparation = 1e-9;
constexpr double kRankThreshold = 1e-9;

void enumerate_exponents(int p, int budget, std::vector<int>& current, std::vector<std::vector<int>>& out) {
    if (static_cast<int>(current.size()) == p - 1) {
        for (int k = 0; k <= budget; ++k) {
            current.push_back(k);
            out.push_back(current);
            current.pop_back();
        }
        return;
    }
    for (int k = 0; k <= budget; ++k) {
        current.push_back(k);
        enumerate_exponents(p, budget - k, current, out);
        current.pop_back();
    }
}

// All size-k subsets of {0, ..., n-1} in lexicographic order.
std::vector<std::vector<int>> subsets(int n, int k) {
    std::vector<std::vector<int>> out;
    std::vector<int> idx(k);
    for (int i = 0; i < k; ++i)
        idx[i] = i;
    while (true) {
        out.push_back(idx);
        int i = k - 1;
        while (i >= 0 && idx[i] == n - k + i)
            --i;
        if (i < 0)
            break;
        ++idx[i];
        for (int j = i + 1; j < k; ++j)
            idx[j] = idx[j - 1] + 1;
    }
    return out;
}

Eigen::MatrixXd evaluation_matrix(int d, int p, const std::vector<Eigen::VectorXd>& points) {
    const auto exps = monomial_exponents(p, d);
    Eigen::MatrixXd v(static_cast<int>(exps.size()), static_cast<int>(points.size()));
    for (int col = 0; col < static_cast<int>(points.size()); ++col) {
        const Eigen::VectorXd& pt = points[col];
        if (pt.size() != p)
            throw DimensionError("verify_general_position: point " + std::to_string(col) + " has dimension " +
                                 std::to_string(pt.size()) + ", expected " + std::to_string(p));
        for (int row = 0; row < static_cast<int>(exps.size()); ++row) {
            double mono = 1.0;
            for (int i = 0; i < p; ++i)
                for (int k = 0; k < exps[row][i]; ++k)
                    mono *= pt[i];
            v(row, col) = mono;
        }
    }
    return v;
}

int numeric_rank(const Eigen::MatrixXd& m, double* min_sv = nullptr) {
    if (m.rows() == 0 || m.cols() == 0) {
        if (min_sv)
            *min_sv = 0.0;
        return 0;
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
    const auto& sv = svd.singularValues();
    if (min_sv)
        *min_sv = sv.size() > 0 ? sv(sv.size() - 1) : 0.0;
    if (sv.size() == 0)
        return 0;
    const double cutoff = kRankThreshold * sv(0);
    int rank = 0;
    for (int i = 0; i < sv.size(); ++i)
        if (sv(i) > cutoff)
            ++rank;
    return rank;
}

} // namespace

std::vector<std::vector<int>> monomial_exponents(int p, int d) {
    if (p <= 0)
        throw DimensionError("monomial_exponents: p must be positive");
    if (d < 0)
        throw ArgumentError("monomial_exponents: d must be nonnegative");
    std::vector<std::vector<int>> out;
    std::vector<int> current;
    enumerate_exponents(p, d, current, out);
    return out;
}

long long binomial(int n, int k) {
    if (k < 0 || k > n)
        return 0;
    k = std::min(k, n - k);
    long long acc = 1;
    for (int i = 1; i <= k; ++i)
        acc = acc * (n - k + i) / i;
    return acc;
}

Eigen::VectorXd coeffs_from_roots(const std::vector<double>& roots) {
    const int p = static_cast<int>(roots.size());
    // Coefficients of prod (T - a_i), highest power first, grown one root at
    // a time.
    std::vector<double> c{1.0};
    for (double a : roots) {
        std::vector<double> next(c.size() + 1, 0.0);
        for (size_t i = 0; i < c.size(); ++i) {
            next[i] += c[i];
            next[i + 1] -= a * c[i];
        }
        c = std::move(next);
    }
    Eigen::VectorXd out(p);
    for (int i = 0; i < p; ++i)
        out[i] = c[i + 1];
    return out;
}

GeneralPositionSet build_general_position(int d, int p, const std::vector<double>& anchors) {
    if (p <= 0)
        throw DimensionError("build_general_position: p must be positive");
    if (d < 0)
        throw ArgumentError("build_general_position: d must be nonnegative");
    if (static_cast<int>(anchors.size()) != p + d)
        throw ValidationError("build_general_position: expected " + std::to_string(p + d) + " anchors, got " +
                              std::to_string(anchors.size()));
    for (size_t i = 0; i < anchors.size(); ++i)
        for (size_t j = i + 1; j < anchors.size(); ++j)
            if (std::abs(anchors[i] - anchors[j]) <= kAnchorSeparation)
                throw ValidationError("build_general_position: anchors " + std::to_string(i) + " and " +
                                      std::to_string(j) + " coincide");

    GeneralPositionSet set;
    set.d = d;
    set.p = p;
    set.anchors = anchors;
    for (const auto& sigma : subsets(p + d, p)) {
        std::vector<double> roots;
        roots.reserve(p);
        for (int i : sigma)
            roots.push_back(anchors[i]);
        set.points.push_back(coeffs_from_roots(roots));
    }
    return set;
}

GeneralPositionCertificate verify_general_position(int d, int p, const std::vector<Eigen::VectorXd>& points) {
    GeneralPositionCertificate cert;
    if (points.empty())
        return cert;
    const Eigen::MatrixXd v = evaluation_matrix(d, p, points);
    const int full = static_cast<int>(v.rows());
    cert.rank = numeric_rank(v, &cert.min_singular_value);
    cert.general_position = (cert.rank == full);
    if (cert.general_position) {
        cert.minimal = true;
        for (int drop = 0; drop < v.cols() && cert.minimal; ++drop) {
            Eigen::MatrixXd reduced(v.rows(), v.cols() - 1);
            reduced << v.leftCols(drop), v.rightCols(v.cols() - drop - 1);
            if (numeric_rank(reduced) == full)
                cert.minimal = false;
        }
    }
    return cert;
}

GeneralPositionCertificate verify_general_position(const GeneralPositionSet& set) {
    return verify_general_position(set.d, set.p, set.points);
}

std::vector<Eigen::VectorXd> normalize_to_template_origin(const GeneralPositionSet& set) {
    if (set.points.empty())
        throw ValidationError("normalize_to_template_origin: empty point set");
    const auto cert = verify_general_position(set);
    if (!cert.general_position)
        throw ValidationError("normalize_to_template_origin: set fails the general position certificate (rank " +
                              std::to_string(cert.rank) + ")");
    Eigen::VectorXd target = Eigen::VectorXd::Zero(set.p);
    target[0] = 1.0;
    const Eigen::VectorXd shift = target - set.points[0];
    std::vector<Eigen::VectorXd> out;
    out.reserve(set.points.size());
    for (const auto& pt : set.points)
        out.push_back(pt + shift);
    return out;
}

} // namespace ctrltpl
