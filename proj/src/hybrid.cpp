#include "ctrltpl/hybrid.hpp"

#include <cmath>
#include <cstdio>
#include <string>
#include <tuple>

namespace ctrltpl {

namespace {

constexpr double kOrthogonalityTol = 1e-10;
constexpr double kTimeSlack = 1e-9;

void check_loop_state(const LoopState& st, const StateAffineSystem& sys, double delta) {
    const int n = sys.n(), p = sys.p();
    if (st.x.size() != n || st.xhat.size() != n)
        throw DimensionError("LoopState: state vectors must have dimension " + std::to_string(n));
    if (st.s_gain.rows() != n || st.s_gain.cols() != n)
        throw DimensionError("LoopState: S must be " + std::to_string(n) + "x" + std::to_string(n));
    if ((st.s_gain - st.s_gain.transpose()).norm() > 1e-10 * std::max(1.0, st.s_gain.norm()))
        throw ValidationError("LoopState: S is not symmetric");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (st.s_gain + st.s_gain.transpose()),
                                                      Eigen::EigenvaluesOnly);
    if (!(es.eigenvalues().minCoeff() > 0.0))
        throw ValidationError("LoopState: S is not positive-definite");
    if (st.timer < 0.0 || st.timer > delta + kTimeSlack)
        throw ValidationError("LoopState: timer outside [0, Delta]");
    if (st.mu < 0.0)
        throw ValidationError("LoopState: mu must be nonnegative");
    if (st.rotation.rows() != p || st.rotation.cols() != p)
        throw DimensionError("LoopState: rotation must be " + std::to_string(p) + "x" + std::to_string(p));
    if ((st.rotation.transpose() * st.rotation - Eigen::MatrixXd::Identity(p, p)).norm() > kOrthogonalityTol)
        throw ValidationError("LoopState: rotation is not orthogonal");
}

void format_value(std::string& line, double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    line += buf;
}

} // namespace

Eigen::VectorXd saturate(const Eigen::VectorXd& x, std::optional<double> rho) {
    if (!rho)
        return x;
    if (*rho <= 0.0)
        throw ArgumentError("saturate: radius must be positive");
    const double norm = x.norm();
    if (norm <= *rho)
        return x;
    return x * (*rho / norm);
}

Eigen::MatrixXd rotation_to(const Eigen::VectorXd& v) {
    const int p = static_cast<int>(v.size());
    const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(p, p);
    const double norm = v.norm();
    if (norm == 0.0)
        return id;
    Eigen::VectorXd q = -v / norm;
    q[0] += 1.0;  // q = e1 - v/|v|
    const double qq = q.squaredNorm();
    if (qq < 1e-28)
        return id;
    return id - (2.0 / qq) * (q * q.transpose());
}

FeedbackLaw::FeedbackLaw(Callable fn, int state_dim, int input_dim, std::optional<double> sat,
                         std::optional<Eigen::MatrixXd> gain)
    : fn_(std::move(fn)), state_dim_(state_dim), input_dim_(input_dim), saturation_radius_(sat),
      gain_(std::move(gain)) {
    if (state_dim_ <= 0 || input_dim_ <= 0)
        throw DimensionError("FeedbackLaw: dimensions must be positive");
    if (saturation_radius_ && *saturation_radius_ <= 0.0)
        throw ValidationError("FeedbackLaw: saturation radius must be positive");
    const Eigen::VectorXd at_origin = fn_(Eigen::VectorXd::Zero(state_dim_));
    if (at_origin.size() != input_dim_)
        throw DimensionError("FeedbackLaw: callable output dimension mismatch");
    if (at_origin.norm() > 1e-12)
        throw ValidationError("FeedbackLaw: lambda(0) must vanish, got norm " + std::to_string(at_origin.norm()));
}

FeedbackLaw FeedbackLaw::linear(const Eigen::MatrixXd& gain, std::optional<double> saturation_radius) {
    Eigen::MatrixXd k = gain;
    return FeedbackLaw([k](const Eigen::VectorXd& x) { return Eigen::VectorXd(k * x); },
                       static_cast<int>(gain.cols()), static_cast<int>(gain.rows()), saturation_radius, gain);
}

FeedbackLaw FeedbackLaw::custom(Callable fn, int state_dim, int input_dim,
                                std::optional<double> saturation_radius) {
    return FeedbackLaw(std::move(fn), state_dim, input_dim, saturation_radius, std::nullopt);
}

Eigen::VectorXd FeedbackLaw::operator()(const Eigen::VectorXd& x) const {
    if (x.size() != state_dim_)
        throw DimensionError("FeedbackLaw: state has dimension " + std::to_string(x.size()) + ", expected " +
                             std::to_string(state_dim_));
    return fn_(saturate(x, saturation_radius_));
}

LoopState jump(const LoopState& state, const FeedbackLaw& feedback) {
    LoopState next = state;
    const Eigen::VectorXd lambda = feedback(state.xhat);
    next.timer = 0.0;
    next.mu = lambda.norm();
    next.rotation = rotation_to(lambda);
    next.jump_count = state.jump_count + 1;
    return next;
}

HybridTrajectory simulate(const StateAffineSystem& sys, const TemplateFamily& family, const FeedbackLaw& feedback,
                          double theta, double delta, const LoopState& init, double t_final, int substeps) {
    if (delta <= 0.0 || delta > family.t_max())
        throw ArgumentError("simulate: delta outside (0, " + std::to_string(family.t_max()) + "]");
    if (t_final <= 0.0)
        throw ArgumentError("simulate: t_final must be positive");
    if (substeps < 1)
        throw ArgumentError("simulate: substeps must be at least 1");
    if (family.dims() != sys.p())
        throw DimensionError("simulate: template dimension does not match the system input dimension");
    if (feedback.state_dim() != sys.n() || feedback.input_dim() != sys.p())
        throw DimensionError("simulate: feedback dimensions do not match the system");
    check_loop_state(init, sys, delta);

    const InputSignal base = family.signal(delta);
    Eigen::VectorXd x = init.x;
    Eigen::VectorXd err = init.xhat - init.x;
    Eigen::MatrixXd s = 0.5 * (init.s_gain + init.s_gain.transpose());
    double mu = init.mu;
    Eigen::MatrixXd rot = init.rotation;
    long j = init.jump_count;

    HybridTrajectory traj;
    const auto record = [&](double t, double timer, const Eigen::VectorXd& u) {
        TrajectorySample smp;
        smp.t = t;
        smp.j = j;
        smp.state.x = x;
        smp.state.xhat = x + err;
        smp.state.s_gain = s;
        smp.state.timer = timer;
        smp.state.mu = mu;
        smp.state.rotation = rot;
        smp.state.jump_count = j;
        smp.err = err;
        smp.u = u;
        traj.samples.push_back(std::move(smp));
    };

    const double time_slack = kTimeSlack * std::max(1.0, t_final);
    double period_start_t = 0.0;   // absolute time at which the current period's flow began
    double timer_start = init.timer;

    record(0.0, timer_start, mu * (rot * base.value(timer_start)));

    while (period_start_t < t_final - time_slack) {
        // Flow this period from timer_start to Delta, or stop early at t_final.
        const double flow_whole = delta - timer_start;
        const double remaining = t_final - period_start_t;
        const bool full_period = flow_whole <= remaining + time_slack;
        const double flow_len = full_period ? flow_whole : remaining;

        for_each_piece(base, timer_start, timer_start + flow_len,
                       [&](const Eigen::VectorXd& level, double a, double b) {
            const Eigen::VectorXd u = mu * (rot * level);
            const Eigen::MatrixXd am = sys.a(u);
            const Eigen::MatrixXd cm = sys.c(u);
            const Eigen::MatrixXd ctc = cm.transpose() * cm;
            const Eigen::VectorXd bv = sys.b(u);
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
                const double timer = a + (i + 1) * h;
                const double t = period_start_t + (timer - timer_start);
                if (!x.allFinite() || !err.allFinite() || !s.allFinite())
                    throw DivergenceError("simulate: non-finite state at t = " + std::to_string(t) + ", j = " +
                                          std::to_string(j) + "; last valid sample at t = " +
                                          std::to_string(traj.samples.back().t));
                record(t, timer, u);
            }
        });

        if (!full_period)
            break;

        // Timer reached Delta: jump. x, xhat, S are untouched.
        const double jump_t = period_start_t + flow_whole;
        const Eigen::VectorXd lambda = feedback(x + err);
        mu = lambda.norm();
        rot = rotation_to(lambda);
        ++j;
        traj.jump_times.push_back(jump_t);
        record(jump_t, 0.0, mu * (rot * base.value(0.0)));

        period_start_t = jump_t;
        timer_start = 0.0;
    }
    return traj;
}

void write_trajectory_csv(const HybridTrajectory& trajectory, std::ostream& os) {
    if (trajectory.samples.empty())
        throw ArgumentError("write_trajectory_csv: empty trajectory");
    const int n = static_cast<int>(trajectory.samples.front().state.x.size());
    const int p = static_cast<int>(trajectory.samples.front().u.size());

    std::string line = "t,j";
    for (int i = 1; i <= n; ++i)
        line += ",x_" + std::to_string(i);
    for (int i = 1; i <= n; ++i)
        line += ",xhat_" + std::to_string(i);
    line += ",err_norm,log10_err_norm";
    for (int i = 1; i <= p; ++i)
        line += ",u_" + std::to_string(i);
    line += ",s_timer,mu,S_min_eig,S_max_eig\n";
    os << line;

    for (const auto& smp : trajectory.samples) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(smp.state.s_gain, Eigen::EigenvaluesOnly);
        const double err_norm = smp.err.norm();
        line.clear();
        format_value(line, smp.t);
        line += ',';
        line += std::to_string(smp.j);
        for (int i = 0; i < n; ++i) {
            line += ',';
            format_value(line, smp.state.x[i]);
        }
        for (int i = 0; i < n; ++i) {
            line += ',';
            format_value(line, smp.state.xhat[i]);
        }
        line += ',';
        format_value(line, err_norm);
        line += ',';
        format_value(line, std::log10(err_norm));
        for (int i = 0; i < p; ++i) {
            line += ',';
            format_value(line, smp.u[i]);
        }
        line += ',';
        format_value(line, smp.state.timer);
        line += ',';
        format_value(line, smp.state.mu);
        line += ',';
        format_value(line, es.eigenvalues().minCoeff());
        line += ',';
        format_value(line, es.eigenvalues().maxCoeff());
        line += '\n';
        os << line;
    }
}

} // namespace ctrltpl
