#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ctrltpl/hybrid.hpp"
#include "ctrltpl/system.hpp"
#include "ctrltpl/templates.hpp"

namespace ctrltpl {

// Declarative description of a closed-loop scenario, read from JSON.
// Polynomial entries are encoded as term lists, each term a pair
// [coefficient, [e_1, ..., e_p]].
struct ScenarioConfig {
    struct Template {
        TemplateKind kind = TemplateKind::kSquare;
        std::optional<int> levels;                   // siso
        std::optional<int> degree;                   // genpos (defaults to the system bound)
        std::optional<std::vector<double>> anchors;  // genpos (defaults to 0, 1, ...)
        std::vector<Eigen::VectorXd> points;         // explicit
    };
    struct Certification {
        double lambda_bar = 1.0;
        int mu_grid = 50;
        int rot_grid = 64;
        std::uint64_t seed = 1;
    };

    int n = 0, m = 0, p = 0;
    PolyMatrix a{1, 1, 1};
    PolyMatrix c{1, 1, 1};
    std::vector<MultiPoly> b;

    Eigen::MatrixXd feedback_gain;
    std::optional<double> saturation_radius;

    double theta = 0.0;
    double delta = 0.0;
    double t_final = 0.0;
    int substeps = kDefaultSubsteps;

    Template tpl;
    Eigen::VectorXd x0, xhat0;
    Eigen::MatrixXd s0;

    Certification certification;
    std::string output_path = "trajectory.csv";

    StateAffineSystem system() const { return StateAffineSystem(a, c, b); }
    FeedbackLaw feedback() const { return FeedbackLaw::linear(feedback_gain, saturation_radius); }
    TemplateFamily family() const;
    LoopState initial_state() const;
};

// Parses and validates a JSON scenario. Cross-dimension checks and the
// observability-at-target assumption are enforced here; violations raise
// ValidationError (or ObservabilityError) naming the offending field.
ScenarioConfig parse_config(const std::string& text);

// Canonical JSON serialization; parse(serialize(cfg)) is field-equivalent.
std::string serialize_config(const ScenarioConfig& config);

} // namespace ctrltpl
