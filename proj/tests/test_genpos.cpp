#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>

#include "ctrltpl/genpos.hpp"
#include "helpers.hpp"

using namespace ctrltpl;
using testutil::random_poly;

namespace {

std::vector<double> iota_anchors(int count) {
    std::vector<double> a(count);
    for (int i = 0; i < count; ++i)
        a[i] = static_cast<double>(i);
    return a;
}

} // namespace

TEST_CASE("coeffs_from_roots: hand expansions") {
    CHECK(coeffs_from_roots({0.0})(0) == 0.0);

    const Eigen::VectorXd c01 = coeffs_from_roots({0.0, 1.0});  // T^2 - T
    CHECK(c01(0) == doctest::Approx(-1.0));
    CHECK(c01(1) == doctest::Approx(0.0));

    const Eigen::VectorXd c12 = coeffs_from_roots({1.0, 2.0});  // T^2 - 3T + 2
    CHECK(c12(0) == doctest::Approx(-3.0));
    CHECK(c12(1) == doctest::Approx(2.0));
}

TEST_CASE("build_general_position: small hand cases") {
    const auto s11 = build_general_position(1, 1, {0.0, 1.0});
    REQUIRE(s11.points.size() == 2);
    CHECK(s11.points[0](0) == doctest::Approx(0.0));
    CHECK(s11.points[1](0) == doctest::Approx(-1.0));

    const auto s12 = build_general_position(1, 2, {0.0, 1.0, 2.0});
    REQUIRE(s12.points.size() == 3);
    CHECK((s12.points[0] - Eigen::Vector2d(-1.0, 0.0)).norm() == doctest::Approx(0.0));
    CHECK((s12.points[1] - Eigen::Vector2d(-2.0, 0.0)).norm() == doctest::Approx(0.0));
    CHECK((s12.points[2] - Eigen::Vector2d(-3.0, 2.0)).norm() == doctest::Approx(0.0));

    const auto s01 = build_general_position(0, 1, {7.0});
    REQUIRE(s01.points.size() == 1);
    CHECK(s01.points[0](0) == doctest::Approx(-7.0));
    CHECK(verify_general_position(s01).general_position);
}

TEST_CASE("build_general_position rejects duplicate anchors") {
    CHECK_THROWS_AS(build_general_position(1, 1, {2.0, 2.0}), ValidationError);
    CHECK_THROWS_AS(build_general_position(1, 2, {0.0, 1.0}), ValidationError);  // wrong count
}

TEST_CASE("verify_general_position: certificates") {
    const auto cert = verify_general_position(build_general_position(1, 1, {0.0, 1.0}));
    CHECK(cert.rank == 2);
    CHECK(cert.general_position);
    CHECK(cert.minimal);

    // Duplicated point: the evaluation matrix loses rank.
    std::vector<Eigen::VectorXd> dup(2, Eigen::VectorXd::Zero(1));
    const auto bad = verify_general_position(1, 1, dup);
    CHECK(bad.rank == 1);
    CHECK_FALSE(bad.general_position);

    const auto big = verify_general_position(build_general_position(3, 2, iota_anchors(5)));
    CHECK(big.rank == 10);
    CHECK(big.general_position);
    CHECK(big.minimal);
}

TEST_CASE("property: construction is full rank and minimal across (d, p)") {
    const std::pair<int, int> cases[] = {{1, 1}, {2, 1}, {1, 2}, {2, 2}, {3, 2}, {2, 3}};
    for (const auto& [d, p] : cases) {
        CAPTURE(d);
        CAPTURE(p);
        const auto set = build_general_position(d, p, iota_anchors(p + d));
        CHECK(static_cast<long long>(set.points.size()) == binomial(p + d, p));
        const auto cert = verify_general_position(set);
        CHECK(cert.rank == static_cast<int>(set.points.size()));
        CHECK(cert.general_position);
        CHECK(cert.minimal);
    }
}

TEST_CASE("property: permuting anchors permutes points, certificate unchanged") {
    std::mt19937_64 rng(5);
    const auto base = build_general_position(2, 2, {0.0, 1.0, 2.0, 3.0});
    const auto base_cert = verify_general_position(base);
    std::vector<double> anchors = base.anchors;
    for (int trial = 0; trial < 5; ++trial) {
        std::shuffle(anchors.begin(), anchors.end(), rng);
        const auto perm = build_general_position(2, 2, anchors);
        const auto cert = verify_general_position(perm);
        CHECK(cert.rank == base_cert.rank);
        CHECK(cert.minimal == base_cert.minimal);
        // Same point set up to order.
        for (const auto& pt : perm.points) {
            const bool found = std::any_of(base.points.begin(), base.points.end(),
                                           [&](const Eigen::VectorXd& q) { return (q - pt).norm() < 1e-9; });
            CHECK(found);
        }
    }
}

TEST_CASE("property: every nonzero low-degree polynomial has a witness point") {
    std::mt19937_64 rng(29);
    const std::pair<int, int> cases[] = {{2, 2}, {3, 2}, {2, 3}};
    for (const auto& [d, p] : cases) {
        const auto set = build_general_position(d, p, iota_anchors(p + d));
        for (int trial = 0; trial < 50; ++trial) {
            const MultiPoly h = random_poly(rng, p, d, 6);
            if (h.is_zero())
                continue;
            double hnorm = 0.0;
            for (const auto& [e, c] : h.terms())
                hnorm = std::max(hnorm, std::abs(c));
            double best = 0.0;
            for (const auto& pt : set.points)
                best = std::max(best, std::abs(h.eval(pt)));
            CHECK(best > 1e-9 * hnorm);
        }
    }
}

TEST_CASE("normalize_to_template_origin") {
    const auto s12 = build_general_position(1, 2, {0.0, 1.0, 2.0});
    const auto norm = normalize_to_template_origin(s12);
    REQUIRE(norm.size() == 3);
    CHECK((norm[0] - Eigen::Vector2d(1.0, 0.0)).norm() == doctest::Approx(0.0));
    CHECK((norm[1] - Eigen::Vector2d(0.0, 0.0)).norm() == doctest::Approx(0.0));
    CHECK((norm[2] - Eigen::Vector2d(-1.0, 2.0)).norm() == doctest::Approx(0.0));
    // Still in general position after the translation.
    CHECK(verify_general_position(1, 2, norm).general_position);

    const auto s01 = build_general_position(0, 1, {7.0});
    CHECK(normalize_to_template_origin(s01)[0](0) == doctest::Approx(1.0));

    // Already normalized: unchanged.
    GeneralPositionSet manual;
    manual.d = 1;
    manual.p = 2;
    manual.points = {Eigen::Vector2d(1.0, 0.0), Eigen::Vector2d(0.0, 1.0), Eigen::Vector2d(0.0, 0.0)};
    const auto same = normalize_to_template_origin(manual);
    for (size_t i = 0; i < manual.points.size(); ++i)
        CHECK((same[i] - manual.points[i]).norm() == 0.0);

    GeneralPositionSet degenerate;
    degenerate.d = 1;
    degenerate.p = 1;
    degenerate.points = {Eigen::VectorXd::Zero(1), Eigen::VectorXd::Zero(1)};
    CHECK_THROWS_AS(normalize_to_template_origin(degenerate), ValidationError);
}
