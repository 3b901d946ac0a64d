#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "ctrltpl/observer.hpp"
#include "ctrltpl/templates.hpp"
#include "helpers.hpp"

using namespace ctrltpl;
using namespace testutil;

namespace {

StateAffineSystem scalar_integrator() {
    // n = 1, A = 0, C = 1.
    PolyMatrix a(1, 1, 1);
    PolyMatrix c(1, 1, 1);
    c(0, 0) = MultiPoly::constant(1, 1.0);
    return StateAffineSystem(a, c, {MultiPoly(1)});
}

} // namespace

TEST_CASE("observer rhs: innovation structure") {
    const auto sys = benchmark_system();
    std::mt19937_64 rng(61);
    const Eigen::VectorXd u = random_vector(rng, 2);
    ObserverState st{random_vector(rng, 3), random_spd(rng, 3)};

    // Zero innovation: the estimate just follows the plant field.
    const Eigen::VectorXd y = sys.c(u) * st.xhat;
    const auto rhs = observer_rhs(sys, u, st, y, 50.0);
    CHECK((rhs.dxhat - (sys.a(u) * st.xhat + sys.b(u))).norm() < 1e-12);
    CHECK((rhs.ds - rhs.ds.transpose()).norm() == 0.0);

    // Scalar case: dS = -theta S + 1 with equilibrium 1/theta.
    const auto scal = scalar_integrator();
    ObserverState st1{Eigen::VectorXd::Zero(1), Eigen::MatrixXd::Constant(1, 1, 0.02)};
    const auto rhs1 = observer_rhs(scal, Eigen::VectorXd::Zero(1), st1, Eigen::VectorXd::Zero(1), 50.0);
    CHECK(rhs1.ds(0, 0) == doctest::Approx(-50.0 * 0.02 + 1.0));
    ObserverState eq{Eigen::VectorXd::Zero(1), Eigen::MatrixXd::Constant(1, 1, 1.0 / 50.0)};
    CHECK(observer_rhs(scal, Eigen::VectorXd::Zero(1), eq, Eigen::VectorXd::Zero(1), 50.0).ds(0, 0) ==
          doctest::Approx(0.0));
}

TEST_CASE("observer rhs matches a finite difference of the integrated flow") {
    const auto sys = benchmark_system();
    std::mt19937_64 rng(67);
    const Eigen::VectorXd u0 = Eigen::VectorXd::Zero(2);
    const Eigen::VectorXd x0 = random_vector(rng, 3);
    const Eigen::VectorXd xhat0 = random_vector(rng, 3);
    const Eigen::MatrixXd s0 = random_spd(rng, 3);
    const double theta = 10.0;
    const double h = 1e-5;

    const InputSignal sig = InputSignal::constant(u0, h);
    const auto run = simulate_observer(sys, sig, x0, xhat0, s0, theta, 1);
    const auto& last = run.back();

    ObserverState st{xhat0, s0};
    const auto rhs = observer_rhs(sys, u0, st, sys.c(u0) * x0, theta);
    CHECK((last.xhat - xhat0 - h * rhs.dxhat).norm() < 100.0 * h * h * (1.0 + rhs.dxhat.norm()));
    CHECK((last.s - s0 - h * rhs.ds).norm() < 100.0 * h * h * (1.0 + rhs.ds.norm()));
}

TEST_CASE("observer rhs rejects a singular gain") {
    const auto sys = benchmark_system();
    ObserverState st{Eigen::VectorXd::Zero(3), Eigen::MatrixXd::Identity(3, 3)};
    st.s(2, 2) = 1e-16;
    CHECK_THROWS_AS(observer_rhs(sys, Eigen::VectorXd::Zero(2), st, Eigen::VectorXd::Zero(1), 50.0),
                    GainSingularityError);
}

TEST_CASE("steady-state gain: scalar and benchmark") {
    const auto scal = scalar_integrator();
    const Eigen::MatrixXd s1 = steady_state_gain(scal, 50.0);
    CHECK(s1(0, 0) == doctest::Approx(0.02).epsilon(1e-12));

    const auto sys = benchmark_system();
    const Eigen::MatrixXd sinf = steady_state_gain(sys, 50.0);
    const Eigen::MatrixXd a0 = sys.a(Eigen::VectorXd::Zero(2));
    const Eigen::MatrixXd c0 = sys.c(Eigen::VectorXd::Zero(2));
    CHECK((a0.transpose() * sinf + sinf * a0 + 50.0 * sinf - c0.transpose() * c0).norm() <= 1e-10);
    CHECK((sinf - sinf.transpose()).norm() < 1e-14);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sinf, Eigen::EigenvaluesOnly);
    CHECK(es.eigenvalues().minCoeff() > 0.0);

    // theta below 2||A(0)|| is rejected.
    CHECK_THROWS_AS(steady_state_gain(sys, 20.0), ArgumentError);
}

TEST_CASE("gain flow converges to the steady state") {
    const auto sys = benchmark_system();
    const double theta = 50.0;
    const Eigen::MatrixXd sinf = steady_state_gain(sys, theta);
    const InputSignal zero = InputSignal::constant(Eigen::VectorXd::Zero(2), 2.0);
    const Eigen::MatrixXd s2 = integrate_gain(sys, zero, Eigen::MatrixXd::Identity(3, 3), theta, 0.0, 2.0, 2000);
    CHECK((s2 - sinf).norm() <= 1e-6);
}

TEST_CASE("variation of constants: boundary cases") {
    const auto sys = benchmark_system();
    std::mt19937_64 rng(71);
    const Eigen::MatrixXd s0 = random_spd(rng, 3);
    const InputSignal zero = InputSignal::constant(Eigen::VectorXd::Zero(2), 1.0);

    CHECK((variation_of_constants_S(sys, zero, s0, 30.0, 0.3, 0.3) - s0).norm() < 1e-14);
    CHECK_THROWS_AS(variation_of_constants_S(sys, zero, s0, 30.0, 0.5, 0.3), ArgumentError);

    // C = 0: only the decay-conjugation term survives.
    PolyMatrix zc(1, 3, 2);
    const StateAffineSystem blind(sys.a_poly(), zc, sys.b_poly());
    const double theta = 7.0, t = 0.4;
    const Eigen::MatrixXd got = variation_of_constants_S(blind, zero, s0, theta, 0.0, t, 40);
    const Eigen::MatrixXd phi_back = transition_matrix(blind, zero, 0.0, t, 40).partialPivLu().inverse();
    const Eigen::MatrixXd want = std::exp(-theta * t) * phi_back.transpose() * s0 * phi_back;
    CHECK(rel_err(got, want) < 1e-7);
}

TEST_CASE("variation of constants on the benchmark system") {
    const auto sys = benchmark_system();
    std::mt19937_64 rng(109);
    const Eigen::MatrixXd s0 = random_spd(rng, 3);
    const auto sig = random_signal(rng, 2, 4, 0.5);
    const double theta = 50.0;
    const Eigen::MatrixXd ode = integrate_gain(sys, sig, s0, theta, 0.0, 0.5, 80);
    const Eigen::MatrixXd voc = variation_of_constants_S(sys, sig, s0, theta, 0.0, 0.5, 80);
    CHECK((ode - voc).norm() <= 1e-5 * (1.0 + ode.norm()));
}

TEST_CASE("property: gain ODE agrees with the variation-of-constants oracle") {
    std::mt19937_64 rng(73);
    std::uniform_real_distribution<double> theta_dist(1.0, 20.0);
    for (int trial = 0; trial < 6; ++trial) {
        const int n = 1 + static_cast<int>(rng() % 3);
        const auto sys = random_system(rng, n, 1 + static_cast<int>(rng() % 2), 2);
        const auto sig = random_signal(rng, 2, 1 + static_cast<int>(rng() % 3), 0.5);
        const Eigen::MatrixXd s0 = random_spd(rng, n);
        const double theta = theta_dist(rng);
        const Eigen::MatrixXd ode = integrate_gain(sys, sig, s0, theta, 0.0, 0.5, 60);
        const Eigen::MatrixXd voc = variation_of_constants_S(sys, sig, s0, theta, 0.0, 0.5, 60);
        CHECK((ode - voc).norm() <= 1e-5 * (1.0 + ode.norm()));
    }
}

TEST_CASE("smin lower bound") {
    const auto sys = benchmark_system();
    const double theta = 50.0, delta = 0.02;

    CHECK_THROWS_AS(smin_lower_bound(sys, InputSignal::constant(Eigen::VectorXd::Zero(2), 1.0), theta, 0.5, 0.3, 1.0),
                    ArgumentError);

    // Unobservable segment: C = 0 forces a zero bound.
    PolyMatrix zc(1, 3, 2);
    const StateAffineSystem blind(sys.a_poly(), zc, sys.b_poly());
    CHECK(smin_lower_bound(blind, InputSignal::constant(Eigen::VectorXd::Zero(2), 1.0), theta, 0.0, 0.5, 0.5) == 0.0);

    // One template period: the bound equals e^{-theta Delta} lambda_min(Gramian).
    const InputSignal period = TemplateFamily::square().signal(delta);
    const Eigen::MatrixXd gam = gramian(sys, period, 0.0, delta);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gam, Eigen::EigenvaluesOnly);
    const double bound = smin_lower_bound(sys, period, theta, 0.0, delta, delta);
    CHECK(bound == doctest::Approx(std::exp(-theta * delta) * es.eigenvalues().minCoeff()));
    CHECK(bound > 0.0);

    // Cross-check against the gain flow started at the identity.
    const Eigen::MatrixXd s_end = integrate_gain(sys, period, Eigen::MatrixXd::Identity(3, 3), theta, 0.0, delta);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es2(s_end, Eigen::EigenvaluesOnly);
    CHECK(es2.eigenvalues().minCoeff() >= bound);
}

TEST_CASE("property: error Lyapunov decay and the error bound along open-loop runs") {
    std::mt19937_64 rng(79);
    std::uniform_real_distribution<double> theta_dist(2.0, 12.0);
    for (int trial = 0; trial < 5; ++trial) {
        const int n = 1 + static_cast<int>(rng() % 3);
        const auto sys = random_system(rng, n, 1, 2);
        const auto sig = random_signal(rng, 2, 2, 1.0);
        const double theta = theta_dist(rng);
        const auto run = simulate_observer(sys, sig, random_vector(rng, n), random_vector(rng, n),
                                           random_spd(rng, n), theta, 40);

        const double t0 = run.front().t;
        double prev_log = std::numeric_limits<double>::infinity();
        double smax0 = 0.0, err0 = 0.0;
        for (size_t i = 0; i < run.size(); ++i) {
            const auto& smp = run[i];
            const Eigen::VectorXd err = smp.xhat - smp.x;
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(smp.s, Eigen::EigenvaluesOnly);
            const double smin = es.eigenvalues().minCoeff();
            const double smax = es.eigenvalues().maxCoeff();

            // S stays symmetric and positive-definite.
            CHECK((smp.s - smp.s.transpose()).norm() <= 1e-10 * (1.0 + smp.s.norm()));
            CHECK(smin > 0.0);

            const double quad = err.dot(smp.s * err);
            const double log_lyap = std::log(quad) + theta * (smp.t - t0);
            if (i == 0) {
                smax0 = smax;
                err0 = err.norm();
            } else {
                CHECK(log_lyap <= prev_log + std::log1p(1e-6));
            }
            prev_log = log_lyap;

            // Error bound from the Lyapunov decay and the eigenvalue extremes.
            const double rhs = std::exp(-0.5 * theta * (smp.t - t0)) * std::sqrt(smax0 / smin) * err0 * (1.0 + 1e-6);
            CHECK(err.norm() <= rhs);
        }
    }
}
