#include "ctrltpl/system.hpp"

#include <cmath>
#include <string>

namespace ctrltpl {

namespace {

constexpr double kDomainSlack = 1e-9;

int degree_or_zero(const std::optional<int>& d) { return d ? *d : 0; }

} // namespace

StateAffineSystem::StateAffineSystem(PolyMatrix a, PolyMatrix c, std::vector<MultiPoly> b)
    : a_(std::move(a)), c_(std::move(c)), b_(std::move(b)) {
    n_ = a_.rows();
    m_ = c_.rows();
    p_ = a_.num_vars();
    if (a_.cols() != n_)
        throw DimensionError("StateAffineSystem: A must be square, got " + std::to_string(a_.rows()) + "x" +
                             std::to_string(a_.cols()));
    if (c_.cols() != n_)
        throw DimensionError("StateAffineSystem: C has " + std::to_string(c_.cols()) + " columns, expected " +
                             std::to_string(n_));
    if (static_cast<int>(b_.size()) != n_)
        throw DimensionError("StateAffineSystem: b has " + std::to_string(b_.size()) + " entries, expected " +
                             std::to_string(n_));
    if (c_.num_vars() != p_)
        throw DimensionError("StateAffineSystem: A and C disagree on the number of control variables");
    for (const auto& poly : b_)
        if (poly.num_vars() != p_)
            throw DimensionError("StateAffineSystem: b entries disagree on the number of control variables");
}

Eigen::VectorXd StateAffineSystem::b(const Eigen::VectorXd& u) const {
    Eigen::VectorXd out(n_);
    for (int i = 0; i < n_; ++i)
        out[i] = b_[i].eval(u);
    return out;
}

int StateAffineSystem::deg_a() const { return degree_or_zero(a_.degree()); }
int StateAffineSystem::deg_c() const { return degree_or_zero(c_.degree()); }

int StateAffineSystem::minor_degree_bound() const {
    return n_ * deg_c() + n_ * (n_ - 1) / 2 * deg_a();
}

InputSignal::InputSignal(std::vector<double> breakpoints, std::vector<Eigen::VectorXd> levels)
    : breakpoints_(std::move(breakpoints)), levels_(std::move(levels)) {
    if (levels_.empty() || breakpoints_.size() != levels_.size() + 1)
        throw DimensionError("InputSignal: " + std::to_string(breakpoints_.size()) + " breakpoints for " +
                             std::to_string(levels_.size()) + " levels");
    for (size_t i = 0; i + 1 < breakpoints_.size(); ++i)
        if (!(breakpoints_[i] < breakpoints_[i + 1]))
            throw ValidationError("InputSignal: breakpoints must be strictly increasing");
    const auto d = levels_.front().size();
    for (const auto& lv : levels_) {
        if (lv.size() != d)
            throw DimensionError("InputSignal: levels disagree on dimension");
        if (!lv.allFinite())
            throw ValidationError("InputSignal: non-finite level");
    }
}

InputSignal InputSignal::constant(const Eigen::VectorXd& level, double t_end, double t_begin) {
    return InputSignal({t_begin, t_end}, {level});
}

const Eigen::VectorXd& InputSignal::value(double s) const {
    if (s < breakpoints_.front() - kDomainSlack || s > breakpoints_.back() + kDomainSlack)
        throw ArgumentError("InputSignal: time " + std::to_string(s) + " outside [" +
                            std::to_string(breakpoints_.front()) + ", " + std::to_string(breakpoints_.back()) + "]");
    // First piece whose right end lies strictly beyond s.
    for (size_t k = 0; k + 1 < levels_.size(); ++k)
        if (s < breakpoints_[k + 1])
            return levels_[k];
    return levels_.back();
}

double InputSignal::max_deviation_from_start() const {
    double dev = 0.0;
    for (const auto& lv : levels_)
        dev = std::max(dev, (lv - levels_.front()).norm());
    return dev;
}

void for_each_piece(const InputSignal& u, double s, double t,
                    const std::function<void(const Eigen::VectorXd&, double, double)>& fn) {
    if (s < u.t_begin() - kDomainSlack || t > u.t_end() + kDomainSlack)
        throw ArgumentError("for_each_piece: interval [" + std::to_string(s) + ", " + std::to_string(t) +
                            "] outside the signal domain");
    const auto& bp = u.breakpoints();
    double a = s;
    for (size_t k = 0; k < u.levels().size(); ++k) {
        const double piece_end = std::min(bp[k + 1], t);
        if (piece_end > a) {
            fn(u.levels()[k], a, piece_end);
            a = piece_end;
        }
        if (a >= t)
            return;
    }
    if (a < t)
        fn(u.levels().back(), a, t);
}

PolyMatrix kalman_matrix(const StateAffineSystem& sys) {
    const int n = sys.n(), m = sys.m();
    PolyMatrix block = sys.c_poly();
    PolyMatrix out(m * n, n, sys.p());
    for (int k = 0; k < n; ++k) {
        if (k > 0)
            block = block * sys.a_poly();
        for (int r = 0; r < m; ++r)
            for (int c = 0; c < n; ++c)
                out(k * m + r, c) = block(r, c);
    }
    return out;
}

MinorSelection find_full_rank_minor(const StateAffineSystem& sys) {
    const int n = sys.n();
    const PolyMatrix kal = kalman_matrix(sys);
    const Eigen::MatrixXd at_zero = kal.eval(Eigen::VectorXd::Zero(sys.p()));

    // Greedy scan in stack order with Gram-Schmidt rank tracking.
    std::vector<int> rows;
    Eigen::MatrixXd basis(n, 0);
    for (int r = 0; r < at_zero.rows() && static_cast<int>(rows.size()) < n; ++r) {
        Eigen::VectorXd v = at_zero.row(r).transpose();
        Eigen::VectorXd w = v - basis * (basis.transpose() * v);
        if (w.norm() > 1e-9 * std::max(1.0, v.norm())) {
            basis.conservativeResize(Eigen::NoChange, basis.cols() + 1);
            basis.col(basis.cols() - 1) = w / w.norm();
            rows.push_back(r);
        }
    }
    if (static_cast<int>(rows.size()) < n)
        throw ObservabilityError("find_full_rank_minor: not observable at target (Kalman rank " +
                                 std::to_string(rows.size()) + " < " + std::to_string(n) + " at u = 0)");

    MinorSelection sel;
    sel.row_indices = rows;
    sel.det = polymat_det(kal.select_rows(rows));
    sel.degree_bound = sys.minor_degree_bound();
    return sel;
}

namespace {

// One RK4 step of  d/dt Psi = A Psi  together with the quadrature state
// d/dt G = Psi' Q Psi  over a constant piece.
void rk4_psi_gram(const Eigen::MatrixXd& a, const Eigen::MatrixXd& q, double h, Eigen::MatrixXd& psi,
                  Eigen::MatrixXd& g) {
    const Eigen::MatrixXd p1 = a * psi;
    const Eigen::MatrixXd g1 = psi.transpose() * q * psi;
    const Eigen::MatrixXd psi2 = psi + 0.5 * h * p1;
    const Eigen::MatrixXd p2 = a * psi2;
    const Eigen::MatrixXd g2 = psi2.transpose() * q * psi2;
    const Eigen::MatrixXd psi3 = psi + 0.5 * h * p2;
    const Eigen::MatrixXd p3 = a * psi3;
    const Eigen::MatrixXd g3 = psi3.transpose() * q * psi3;
    const Eigen::MatrixXd psi4 = psi + h * p3;
    const Eigen::MatrixXd p4 = a * psi4;
    const Eigen::MatrixXd g4 = psi4.transpose() * q * psi4;
    psi += h / 6.0 * (p1 + 2.0 * p2 + 2.0 * p3 + p4);
    g += h / 6.0 * (g1 + 2.0 * g2 + 2.0 * g3 + g4);
}

void check_substeps(int substeps) {
    if (substeps < 1)
        throw ArgumentError("substeps must be at least 1, got " + std::to_string(substeps));
}

} // namespace

Eigen::MatrixXd transition_matrix(const StateAffineSystem& sys, const InputSignal& u, double s, double t,
                                  int substeps) {
    check_substeps(substeps);
    const int n = sys.n();
    if (s == t)
        return Eigen::MatrixXd::Identity(n, n);
    const double lo = std::min(s, t), hi = std::max(s, t);
    Eigen::MatrixXd psi = Eigen::MatrixXd::Identity(n, n);
    Eigen::MatrixXd unused = Eigen::MatrixXd::Zero(n, n);
    const Eigen::MatrixXd q = Eigen::MatrixXd::Zero(n, n);
    for_each_piece(u, lo, hi, [&](const Eigen::VectorXd& level, double a, double b) {
        const Eigen::MatrixXd am = sys.a(level);
        const double h = (b - a) / substeps;
        for (int i = 0; i < substeps; ++i)
            rk4_psi_gram(am, q, h, psi, unused);
    });
    if (t > s)
        return psi;
    return psi.partialPivLu().inverse();
}

Eigen::MatrixXd gramian(const StateAffineSystem& sys, const InputSignal& u, double s, double t, int substeps) {
    check_substeps(substeps);
    if (s > t)
        throw ArgumentError("gramian: interval start " + std::to_string(s) + " after end " + std::to_string(t));
    const int n = sys.n();
    if (s == t)
        return Eigen::MatrixXd::Zero(n, n);
    Eigen::MatrixXd psi = Eigen::MatrixXd::Identity(n, n);
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(n, n);
    for_each_piece(u, s, t, [&](const Eigen::VectorXd& level, double a, double b) {
        const Eigen::MatrixXd am = sys.a(level);
        const Eigen::MatrixXd cm = sys.c(level);
        const Eigen::MatrixXd q = cm.transpose() * cm;
        const double h = (b - a) / substeps;
        for (int i = 0; i < substeps; ++i)
            rk4_psi_gram(am, q, h, psi, g);
    });
    // Gamma(t, s) = Psi(t)^{-T} G Psi(t)^{-1}.
    const Eigen::MatrixXd inv = psi.partialPivLu().inverse();
    const Eigen::MatrixXd gam = inv.transpose() * g * inv;
    return 0.5 * (gam + gam.transpose());
}

bool observable_at(const StateAffineSystem& sys, const Eigen::VectorXd& u, double horizon, double tol, int substeps) {
    if (horizon <= 0.0)
        throw ArgumentError("observable_at: horizon must be positive");
    const InputSignal sig = InputSignal::constant(u, horizon);
    const Eigen::MatrixXd gam = gramian(sys, sig, 0.0, horizon, substeps);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gam, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff() > tol;
}

} // namespace ctrltpl
