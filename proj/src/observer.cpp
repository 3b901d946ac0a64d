#include "ctrltpl/observer.hpp"

#include <cmath>
#include <string>
#include <tuple>

namespace ctrltpl {

namespace {
constexpr double kConditionLimit = 1e14;
} // namespace

Eigen::VectorXd gain_solve(const Eigen::MatrixXd& s, const Eigen::VectorXd& rhs) {
    Eigen::LDLT<Eigen::MatrixXd> ldlt(s);
    if (ldlt.info() != Eigen::Success)
        throw GainSingularityError("observer gain matrix is not factorizable");
    const Eigen::VectorXd d = ldlt.vectorD();
    const double dmax = d.cwiseAbs().maxCoeff();
    const double dmin = d.cwiseAbs().minCoeff();
    if (!(dmin > 0.0) || dmax / dmin > kConditionLimit)
        throw GainSingularityError("observer gain matrix is numerically singular (condition estimate above 1e14)");
    return ldlt.solve(rhs);
}

Eigen::MatrixXd gain_equation_rhs(const Eigen::MatrixXd& a, const Eigen::MatrixXd& ctc, double theta,
                                  const Eigen::MatrixXd& s) {
    const Eigen::MatrixXd ds = -a.transpose() * s - s * a - theta * s + ctc;
    return 0.5 * (ds + ds.transpose());
}

ObserverRhs observer_rhs(const StateAffineSystem& sys, const Eigen::VectorXd& u, const ObserverState& state,
                         const Eigen::VectorXd& y, double theta) {
    if (u.size() != sys.p())
        throw DimensionError("observer_rhs: control has dimension " + std::to_string(u.size()) + ", expected " +
                             std::to_string(sys.p()));
    if (state.xhat.size() != sys.n() || state.s.rows() != sys.n() || state.s.cols() != sys.n())
        throw DimensionError("observer_rhs: state shape does not match the system");
    if (y.size() != sys.m())
        throw DimensionError("observer_rhs: output has dimension " + std::to_string(y.size()) + ", expected " +
                             std::to_string(sys.m()));
    const Eigen::MatrixXd a = sys.a(u);
    const Eigen::MatrixXd c = sys.c(u);
    ObserverRhs out;
    out.dxhat = a * state.xhat + sys.b(u) - gain_solve(state.s, c.transpose() * (c * state.xhat - y));
    out.ds = gain_equation_rhs(a, c.transpose() * c, theta, state.s);
    return out;
}

Eigen::MatrixXd steady_state_gain(const StateAffineSystem& sys, double theta) {
    const int n = sys.n();
    const Eigen::VectorXd zero = Eigen::VectorXd::Zero(sys.p());
    const Eigen::MatrixXd a0 = sys.a(zero);
    const Eigen::MatrixXd c0 = sys.c(zero);
    const double a_norm = a0.jacobiSvd().singularValues()(0);
    if (theta < 2.0 * a_norm)
        throw ArgumentError("steady_state_gain: theta = " + std::to_string(theta) + " below 2 ||A(0)|| = " +
                            std::to_string(2.0 * a_norm));

    // vec(A'S + SA + theta S) = (I kron A' + A' kron I + theta I) vec(S).
    Eigen::MatrixXd big = theta * Eigen::MatrixXd::Identity(n * n, n * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) {
                big(i * n + k, i * n + j) += a0(j, k);  // I kron A'
                big(j * n + k, i * n + k) += a0(i, j);  // A' kron I
            }
    const Eigen::MatrixXd ctc = c0.transpose() * c0;
    Eigen::VectorXd rhs(n * n);
    for (int col = 0; col < n; ++col)
        rhs.segment(col * n, n) = ctc.col(col);

    Eigen::FullPivLU<Eigen::MatrixXd> lu(big);
    if (!lu.isInvertible())
        throw ArgumentError("steady_state_gain: vectorized system is singular; theta too small");
    const Eigen::VectorXd vec = lu.solve(rhs);
    Eigen::MatrixXd s(n, n);
    for (int col = 0; col < n; ++col)
        s.col(col) = vec.segment(col * n, n);
    s = 0.5 * (s + s.transpose());

    const double residual = (a0.transpose() * s + s * a0 + theta * s - ctc).norm();
    if (residual > 1e-10 * std::max(1.0, ctc.norm()))
        throw ArgumentError("steady_state_gain: solve residual " + std::to_string(residual) + " above tolerance");
    return s;
}

Eigen::MatrixXd integrate_gain(const StateAffineSystem& sys, const InputSignal& u, const Eigen::MatrixXd& s0,
                               double theta, double t0, double t, int substeps) {
    if (t < t0)
        throw ArgumentError("integrate_gain: t before t0");
    Eigen::MatrixXd s = 0.5 * (s0 + s0.transpose());
    if (t == t0)
        return s;
    for_each_piece(u, t0, t, [&](const Eigen::VectorXd& level, double a, double b) {
        const Eigen::MatrixXd am = sys.a(level);
        const Eigen::MatrixXd cm = sys.c(level);
        const Eigen::MatrixXd ctc = cm.transpose() * cm;
        const double h = (b - a) / substeps;
        for (int i = 0; i < substeps; ++i) {
            const Eigen::MatrixXd k1 = gain_equation_rhs(am, ctc, theta, s);
            const Eigen::MatrixXd k2 = gain_equation_rhs(am, ctc, theta, s + 0.5 * h * k1);
            const Eigen::MatrixXd k3 = gain_equation_rhs(am, ctc, theta, s + 0.5 * h * k2);
            const Eigen::MatrixXd k4 = gain_equation_rhs(am, ctc, theta, s + h * k3);
            s += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            s = 0.5 * (s + s.transpose());
        }
    });
    return s;
}

Eigen::MatrixXd variation_of_constants_S(const StateAffineSystem& sys, const InputSignal& u,
                                         const Eigen::MatrixXd& s0, double theta, double t0, double t,
                                         int substeps) {
    if (t < t0)
        throw ArgumentError("variation_of_constants_S: t before t0");
    const int n = sys.n();
    if (t == t0)
        return 0.5 * (s0 + s0.transpose());

    // Psi(tau) = Phi(tau, t0) on a half-step grid, so each RK4 step of the
    // base grid contributes one Simpson panel.
    struct Node {
        double tau;
        Eigen::MatrixXd psi;
    };
    std::vector<Node> nodes;
    Eigen::MatrixXd psi = Eigen::MatrixXd::Identity(n, n);
    nodes.push_back({t0, psi});
    std::vector<std::pair<int, Eigen::MatrixXd>> piece_ctc;  // panel count + C'C per piece
    for_each_piece(u, t0, t, [&](const Eigen::VectorXd& level, double a, double b) {
        const Eigen::MatrixXd am = sys.a(level);
        const Eigen::MatrixXd cm = sys.c(level);
        piece_ctc.emplace_back(substeps, cm.transpose() * cm);
        const double h2 = (b - a) / (2.0 * substeps);
        for (int i = 0; i < 2 * substeps; ++i) {
            const Eigen::MatrixXd k1 = am * psi;
            const Eigen::MatrixXd k2 = am * (psi + 0.5 * h2 * k1);
            const Eigen::MatrixXd k3 = am * (psi + 0.5 * h2 * k2);
            const Eigen::MatrixXd k4 = am * (psi + h2 * k3);
            psi += h2 / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            nodes.push_back({a + (i + 1) * h2, psi});
        }
    });

    const Eigen::MatrixXd inv_end = nodes.back().psi.partialPivLu().inverse();  // Phi(t0, t)
    const auto integrand = [&](const Node& node, const Eigen::MatrixXd& ctc) -> Eigen::MatrixXd {
        const Eigen::MatrixXd phi = node.psi * inv_end;  // Phi(tau, t)
        return std::exp(-theta * (t - node.tau)) * (phi.transpose() * ctc * phi);
    };

    Eigen::MatrixXd integral = Eigen::MatrixXd::Zero(n, n);
    size_t idx = 0;
    for (const auto& [panels, ctc] : piece_ctc) {
        for (int i = 0; i < panels; ++i) {
            const double h2 = nodes[idx + 1].tau - nodes[idx].tau;
            integral += h2 / 3.0 *
                        (integrand(nodes[idx], ctc) + 4.0 * integrand(nodes[idx + 1], ctc) +
                         integrand(nodes[idx + 2], ctc));
            idx += 2;
        }
    }

    Eigen::MatrixXd s = std::exp(-theta * (t - t0)) * (inv_end.transpose() * s0 * inv_end) + integral;
    return 0.5 * (s + s.transpose());
}

double smin_lower_bound(const StateAffineSystem& sys, const InputSignal& u, double theta, double t0, double t1,
                        double t, int substeps) {
    if (!(t0 <= t1 && t1 <= t))
        throw ArgumentError("smin_lower_bound: requires t0 <= t1 <= t");
    const Eigen::MatrixXd gam = gramian(sys, u, t0, t1, substeps);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gam, Eigen::EigenvaluesOnly);
    const double lmin = std::max(0.0, es.eigenvalues().minCoeff());
    return std::exp(-theta * (t1 - t0)) * lmin;
}

std::vector<ObserverRunSample> simulate_observer(const StateAffineSystem& sys, const InputSignal& u,
                                                 const Eigen::VectorXd& x0, const Eigen::VectorXd& xhat0,
                                                 const Eigen::MatrixXd& s0, double theta, int substeps) {
    const int n = sys.n();
    if (x0.size() != n || xhat0.size() != n || s0.rows() != n || s0.cols() != n)
        throw DimensionError("simulate_observer: initial condition shape does not match the system");

    Eigen::VectorXd x = x0;
    Eigen::VectorXd err = xhat0 - x0;
    Eigen::MatrixXd s = 0.5 * (s0 + s0.transpose());

    std::vector<ObserverRunSample> out;
    out.push_back({u.t_begin(), x, x + err, s});

    for_each_piece(u, u.t_begin(), u.t_end(), [&](const Eigen::VectorXd& level, double a, double b) {
        const Eigen::MatrixXd am = sys.a(level);
        const Eigen::MatrixXd cm = sys.c(level);
        const Eigen::MatrixXd ctc = cm.transpose() * cm;
        const Eigen::VectorXd bv = sys.b(level);
        const double h = (b - a) / substeps;
        const auto rhs = [&](const Eigen::VectorXd& xs, const Eigen::VectorXd& es, const Eigen::MatrixXd& ss) {
            return std::make_tuple(Eigen::VectorXd(am * xs + bv),
                                   Eigen::VectorXd(am * es - gain_solve(ss, ctc * es)),
                                   gain_equation_rhs(am, ctc, theta, ss));
        };
        for (int i = 0; i < substeps; ++i) {
            const auto [dx1, de1, ds1] = rhs(x, err, s);
            const auto [dx2, de2, ds2] = rhs(x + 0.5 * h * dx1, err + 0.5 * h * de1, s + 0.5 * h * ds1);
            const auto [dx3, de3, ds3] = rhs(x + 0.5 * h * dx2, err + 0.5 * h * de2, s + 0.5 * h * ds2);
            const auto [dx4, de4, ds4] = rhs(x + h * dx3, err + h * de3, s + h * ds3);
            x += h / 6.0 * (dx1 + 2.0 * dx2 + 2.0 * dx3 + dx4);
            err += h / 6.0 * (de1 + 2.0 * de2 + 2.0 * de3 + de4);
            s += h / 6.0 * (ds1 + 2.0 * ds2 + 2.0 * ds3 + ds4);
            s = 0.5 * (s + s.transpose());
            out.push_back({a + (i + 1) * h, x, x + err, s});
        }
    });
    return out;
}

} // namespace ctrltpl
