// Command line front end: scenario simulation, template certification,
// general position construction, and observability matrix reports.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "ctrltpl/config.hpp"
#include "ctrltpl/genpos.hpp"
#include "ctrltpl/hybrid.hpp"
#include "ctrltpl/observer.hpp"

namespace {

using nlohmann::ordered_json;

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ctrltpl::ValidationError("cannot read config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

ordered_json poly_terms(const ctrltpl::MultiPoly& poly) {
    ordered_json out = ordered_json::array();
    for (const auto& [e, c] : poly.terms())
        out.push_back(ordered_json::array({c, e}));
    return out;
}

ordered_json vector_json(const Eigen::VectorXd& v) {
    ordered_json out = ordered_json::array();
    for (int i = 0; i < v.size(); ++i)
        out.push_back(v[i]);
    return out;
}

ordered_json matrix_json(const Eigen::MatrixXd& m) {
    ordered_json rows = ordered_json::array();
    for (int r = 0; r < m.rows(); ++r) {
        ordered_json row = ordered_json::array();
        for (int c = 0; c < m.cols(); ++c)
            row.push_back(m(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

int run_simulate(const std::string& config_path, const std::optional<std::string>& out_override) {
    const auto cfg = ctrltpl::parse_config(read_file(config_path));
    const auto sys = cfg.system();
    const auto traj = ctrltpl::simulate(sys, cfg.family(), cfg.feedback(), cfg.theta, cfg.delta,
                                        cfg.initial_state(), cfg.t_final, cfg.substeps);

    const std::string out_path = out_override ? *out_override : cfg.output_path;
    std::ofstream csv(out_path, std::ios::binary);
    if (!csv)
        throw ctrltpl::ValidationError("cannot open output file '" + out_path + "'");
    ctrltpl::write_trajectory_csv(traj, csv);

    const auto& last = traj.samples.back();
    ordered_json summary;
    summary["csv"] = out_path;
    summary["samples"] = traj.samples.size();
    summary["jump_count"] = traj.jump_times.size();
    summary["t_final"] = last.t;
    summary["final_x_norm"] = last.state.x.norm();
    summary["final_err_norm"] = last.err.norm();
    std::cout << summary.dump(2) << "\n";
    return 0;
}

int run_certify(const std::string& config_path, const std::optional<double>& delta,
                const std::optional<double>& lambda_bar, const std::optional<int>& mu_grid,
                const std::optional<int>& rot_grid, const std::optional<std::uint64_t>& seed) {
    const auto cfg = ctrltpl::parse_config(read_file(config_path));
    const auto sys = cfg.system();
    const auto cert = ctrltpl::certify_template(
        sys, cfg.family(), delta ? *delta : cfg.delta, lambda_bar ? *lambda_bar : cfg.certification.lambda_bar,
        mu_grid ? *mu_grid : cfg.certification.mu_grid, rot_grid ? *rot_grid : cfg.certification.rot_grid,
        seed ? *seed : cfg.certification.seed, cfg.substeps);

    ordered_json out;
    out["template_kind"] = ctrltpl::to_string(cfg.tpl.kind);
    out["delta"] = cert.delta;
    out["lambda_bar"] = cert.lambda_bar;
    out["mu_grid"] = cert.mu_grid;
    out["rot_grid"] = cert.rot_grid;
    out["seed"] = cert.seed;
    out["grid"] = cert.grid_description;
    out["g_estimate"] = cert.g_estimate;
    out["worst_mu"] = cert.worst_mu;
    out["worst_rotation"] = matrix_json(cert.worst_rotation);
    std::cout << out.dump(2) << "\n";
    return 0;
}

int run_genpos(int d, int p, const std::vector<double>& anchors_flag) {
    std::vector<double> anchors = anchors_flag;
    if (anchors.empty())
        for (int i = 0; i < p + d; ++i)
            anchors.push_back(static_cast<double>(i));
    const auto set = ctrltpl::build_general_position(d, p, anchors);
    const auto cert = ctrltpl::verify_general_position(set);

    ordered_json out;
    out["d"] = d;
    out["p"] = p;
    ordered_json aj = ordered_json::array();
    for (double a : set.anchors)
        aj.push_back(a);
    out["anchors"] = std::move(aj);
    ordered_json pts = ordered_json::array();
    for (const auto& pt : set.points)
        pts.push_back(vector_json(pt));
    out["points"] = std::move(pts);
    ordered_json normalized = ordered_json::array();
    for (const auto& pt : ctrltpl::normalize_to_template_origin(set))
        normalized.push_back(vector_json(pt));
    out["normalized_points"] = std::move(normalized);
    ordered_json cj;
    cj["rank"] = cert.rank;
    cj["min_singular_value"] = cert.min_singular_value;
    cj["general_position"] = cert.general_position;
    cj["minimal"] = cert.minimal;
    out["certificate"] = std::move(cj);
    std::cout << out.dump(2) << "\n";
    return 0;
}

int run_obsmatrix(const std::string& config_path) {
    const auto cfg = ctrltpl::parse_config(read_file(config_path));
    const auto sys = cfg.system();
    const auto kal = ctrltpl::kalman_matrix(sys);
    const auto minor = ctrltpl::find_full_rank_minor(sys);

    ordered_json out;
    ordered_json kj = ordered_json::array();
    for (int r = 0; r < kal.rows(); ++r) {
        ordered_json row = ordered_json::array();
        for (int c = 0; c < kal.cols(); ++c)
            row.push_back(poly_terms(kal(r, c)));
        kj.push_back(std::move(row));
    }
    out["kalman_matrix"] = std::move(kj);
    out["minor_rows"] = minor.row_indices;
    out["det"] = poly_terms(minor.det);
    out["det_string"] = minor.det.to_string();
    const auto deg = minor.det.degree();
    out["det_degree"] = deg ? ordered_json(*deg) : ordered_json("-inf");
    out["degree_bound"] = minor.degree_bound;
    std::cout << out.dump(2) << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Control template construction, certification, and hybrid observer/feedback simulation "
                 "for state-affine systems"};
    app.require_subcommand(1);

    std::string config_path;
    std::optional<std::string> out_override;
    auto* sim = app.add_subcommand("simulate", "Run the hybrid closed loop and export the trajectory CSV");
    sim->add_option("-c,--config", config_path, "Scenario JSON")->required();
    sim->add_option("-o,--out", out_override, "Override the CSV output path");

    std::string certify_config;
    std::optional<double> certify_delta, certify_lambda;
    std::optional<int> certify_mu_grid, certify_rot_grid;
    std::optional<std::uint64_t> certify_seed;
    auto* cert = app.add_subcommand("certify", "Estimate the template Gramian lower bound over a (mu, R) grid");
    cert->add_option("-c,--config", certify_config, "Scenario JSON")->required();
    cert->add_option("--delta", certify_delta, "Override the period length");
    cert->add_option("--lambda-bar", certify_lambda, "Override the scaling bound");
    cert->add_option("--mu-grid", certify_mu_grid, "Override the number of scaling intervals");
    cert->add_option("--rot-grid", certify_rot_grid, "Override the number of rotation samples");
    cert->add_option("--seed", certify_seed, "Override the RNG seed for O(p) sampling, p >= 3");

    int gp_d = 1, gp_p = 1;
    std::vector<double> gp_anchors;
    auto* gp = app.add_subcommand("genpos", "Construct and certify a minimal point set in general position");
    gp->add_option("-d,--degree", gp_d, "Maximum polynomial degree")->required();
    gp->add_option("-p,--dim", gp_p, "Ambient dimension")->required();
    gp->add_option("--anchors", gp_anchors, "Anchor reals (default 0, 1, ..., p+d-1)");

    std::string obs_config;
    auto* obs = app.add_subcommand("obsmatrix", "Report the symbolic Kalman matrix, chosen minor, and degree bound");
    obs->add_option("-c,--config", obs_config, "Scenario JSON")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (sim->parsed())
            return run_simulate(config_path, out_override);
        if (cert->parsed())
            return run_certify(certify_config, certify_delta, certify_lambda, certify_mu_grid, certify_rot_grid,
                               certify_seed);
        if (gp->parsed())
            return run_genpos(gp_d, gp_p, gp_anchors);
        if (obs->parsed())
            return run_obsmatrix(obs_config);
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 1;
    }
    return 1;
}
