#include "ctrltpl/config.hpp"

#include <json.hpp>

#include "ctrltpl/genpos.hpp"

namespace ctrltpl {

using nlohmann::ordered_json;

namespace {

[[noreturn]] void fail(const std::string& field, const std::string& what) {
    throw ValidationError("config: " + field + ": " + what);
}

const ordered_json& require(const ordered_json& obj, const std::string& field, const std::string& path) {
    if (!obj.is_object())
        fail(path, "expected an object");
    auto it = obj.find(field);
    if (it == obj.end())
        fail(path.empty() ? field : path + "." + field, "missing");
    return *it;
}

double require_number(const ordered_json& obj, const std::string& field, const std::string& path) {
    const auto& v = require(obj, field, path);
    if (!v.is_number())
        fail(path + "." + field, "expected a number");
    return v.get<double>();
}

int require_int(const ordered_json& obj, const std::string& field, const std::string& path) {
    const auto& v = require(obj, field, path);
    if (!v.is_number_integer())
        fail(path + "." + field, "expected an integer");
    return v.get<int>();
}

MultiPoly parse_poly(const ordered_json& terms, int p, const std::string& path) {
    if (!terms.is_array())
        fail(path, "expected a term list [[coeff, [e_1,...,e_p]], ...]");
    std::vector<std::pair<double, Exponents>> parsed;
    for (size_t i = 0; i < terms.size(); ++i) {
        const auto& term = terms[i];
        const std::string tpath = path + "[" + std::to_string(i) + "]";
        if (!term.is_array() || term.size() != 2 || !term[0].is_number() || !term[1].is_array())
            fail(tpath, "expected [coefficient, [e_1,...,e_p]]");
        Exponents e;
        for (const auto& k : term[1]) {
            if (!k.is_number_integer() || k.get<int>() < 0)
                fail(tpath, "exponents must be nonnegative integers");
            e.push_back(k.get<int>());
        }
        if (static_cast<int>(e.size()) != p)
            fail(tpath, "exponent vector length " + std::to_string(e.size()) + ", expected " + std::to_string(p));
        parsed.emplace_back(term[0].get<double>(), std::move(e));
    }
    return MultiPoly(p, std::move(parsed));
}

ordered_json poly_to_json(const MultiPoly& poly) {
    ordered_json out = ordered_json::array();
    for (const auto& [e, c] : poly.terms())
        out.push_back(ordered_json::array({c, e}));
    return out;
}

PolyMatrix parse_poly_matrix(const ordered_json& rows, int nrows, int ncols, int p, const std::string& path) {
    if (!rows.is_array() || static_cast<int>(rows.size()) != nrows)
        fail(path, "expected " + std::to_string(nrows) + " rows");
    std::vector<MultiPoly> entries;
    for (int r = 0; r < nrows; ++r) {
        const auto& row = rows[r];
        if (!row.is_array() || static_cast<int>(row.size()) != ncols)
            fail(path + "[" + std::to_string(r) + "]", "expected " + std::to_string(ncols) + " entries");
        for (int c = 0; c < ncols; ++c)
            entries.push_back(parse_poly(row[c], p, path + "[" + std::to_string(r) + "][" + std::to_string(c) + "]"));
    }
    return PolyMatrix(nrows, ncols, std::move(entries));
}

Eigen::VectorXd parse_vector(const ordered_json& arr, int dim, const std::string& path) {
    if (!arr.is_array() || static_cast<int>(arr.size()) != dim)
        fail(path, "expected a vector of length " + std::to_string(dim));
    Eigen::VectorXd v(dim);
    for (int i = 0; i < dim; ++i) {
        if (!arr[i].is_number())
            fail(path + "[" + std::to_string(i) + "]", "expected a number");
        v[i] = arr[i].get<double>();
    }
    return v;
}

Eigen::MatrixXd parse_matrix(const ordered_json& rows, int nrows, int ncols, const std::string& path) {
    if (!rows.is_array() || static_cast<int>(rows.size()) != nrows)
        fail(path, "expected " + std::to_string(nrows) + " rows");
    Eigen::MatrixXd m(nrows, ncols);
    for (int r = 0; r < nrows; ++r)
        m.row(r) = parse_vector(rows[r], ncols, path + "[" + std::to_string(r) + "]").transpose();
    return m;
}

ordered_json matrix_to_json(const Eigen::MatrixXd& m) {
    ordered_json rows = ordered_json::array();
    for (int r = 0; r < m.rows(); ++r) {
        ordered_json row = ordered_json::array();
        for (int c = 0; c < m.cols(); ++c)
            row.push_back(m(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

ordered_json vector_to_json(const Eigen::VectorXd& v) {
    ordered_json out = ordered_json::array();
    for (int i = 0; i < v.size(); ++i)
        out.push_back(v[i]);
    return out;
}

} // namespace

TemplateFamily ScenarioConfig::family() const {
    switch (tpl.kind) {
    case TemplateKind::kSiso: {
        if (!tpl.levels)
            fail("template.N", "required for the siso kind");
        return TemplateFamily::siso(*tpl.levels);
    }
    case TemplateKind::kSquare:
        return TemplateFamily::square();
    case TemplateKind::kGenpos: {
        const int d = tpl.degree ? *tpl.degree : system().minor_degree_bound();
        std::vector<double> anchors;
        if (tpl.anchors)
            anchors = *tpl.anchors;
        else
            for (int i = 0; i < p + d; ++i)
                anchors.push_back(static_cast<double>(i));
        return TemplateFamily::from_general_position(d, p, anchors);
    }
    case TemplateKind::kExplicit:
        return TemplateFamily::explicit_points(tpl.points);
    }
    throw ValidationError("config: template.kind: unknown kind");
}

LoopState ScenarioConfig::initial_state() const {
    LoopState st;
    st.x = x0;
    st.xhat = xhat0;
    st.s_gain = s0;
    st.timer = 0.0;
    st.mu = 0.0;
    st.rotation = Eigen::MatrixXd::Identity(p, p);
    st.jump_count = 0;
    return st;
}

ScenarioConfig parse_config(const std::string& text) {
    ordered_json root;
    try {
        root = ordered_json::parse(text);
    } catch (const nlohmann::json::parse_error& err) {
        throw ValidationError(std::string("config: malformed JSON: ") + err.what());
    }

    ScenarioConfig cfg;
    const auto& sys = require(root, "system", "");
    cfg.n = require_int(sys, "n", "system");
    cfg.m = require_int(sys, "m", "system");
    cfg.p = require_int(sys, "p", "system");
    if (cfg.n <= 0)
        fail("system.n", "must be positive");
    if (cfg.m <= 0)
        fail("system.m", "must be positive");
    if (cfg.p <= 0)
        fail("system.p", "must be positive");
    cfg.a = parse_poly_matrix(require(sys, "A", "system"), cfg.n, cfg.n, cfg.p, "system.A");
    cfg.c = parse_poly_matrix(require(sys, "C", "system"), cfg.m, cfg.n, cfg.p, "system.C");
    const auto& bjson = require(sys, "b", "system");
    if (!bjson.is_array() || static_cast<int>(bjson.size()) != cfg.n)
        fail("system.b", "expected " + std::to_string(cfg.n) + " polynomial entries");
    for (int i = 0; i < cfg.n; ++i)
        cfg.b.push_back(parse_poly(bjson[i], cfg.p, "system.b[" + std::to_string(i) + "]"));

    const auto& fb = require(root, "feedback", "");
    cfg.feedback_gain = parse_matrix(require(fb, "K", "feedback"), cfg.p, cfg.n, "feedback.K");
    if (fb.contains("saturation_radius") && !fb["saturation_radius"].is_null()) {
        if (!fb["saturation_radius"].is_number() || fb["saturation_radius"].get<double>() <= 0.0)
            fail("feedback.saturation_radius", "must be a positive number or null");
        cfg.saturation_radius = fb["saturation_radius"].get<double>();
    }

    cfg.theta = require_number(root, "theta", "");
    if (cfg.theta <= 0.0)
        fail("theta", "must be positive");
    cfg.delta = require_number(root, "delta", "");
    if (cfg.delta <= 0.0)
        fail("delta", "must be positive");
    cfg.t_final = require_number(root, "t_final", "");
    if (cfg.t_final <= 0.0)
        fail("t_final", "must be positive");
    if (root.contains("substeps")) {
        cfg.substeps = require_int(root, "substeps", "");
        if (cfg.substeps < 1)
            fail("substeps", "must be at least 1");
    }

    const auto& tpl = require(root, "template", "");
    const auto& kind = require(tpl, "kind", "template");
    if (!kind.is_string())
        fail("template.kind", "expected a string");
    const std::string kind_str = kind.get<std::string>();
    if (kind_str == "siso")
        cfg.tpl.kind = TemplateKind::kSiso;
    else if (kind_str == "square")
        cfg.tpl.kind = TemplateKind::kSquare;
    else if (kind_str == "genpos")
        cfg.tpl.kind = TemplateKind::kGenpos;
    else if (kind_str == "explicit")
        cfg.tpl.kind = TemplateKind::kExplicit;
    else
        fail("template.kind", "unknown kind '" + kind_str + "'");
    if (cfg.tpl.kind == TemplateKind::kSiso) {
        cfg.tpl.levels = require_int(tpl, "N", "template");
        if (*cfg.tpl.levels < 1)
            fail("template.N", "must be positive");
        if (cfg.p != 1)
            fail("template.kind", "siso requires p = 1, got p = " + std::to_string(cfg.p));
    }
    if (cfg.tpl.kind == TemplateKind::kSquare && cfg.p != 2)
        fail("template.kind", "square requires p = 2, got p = " + std::to_string(cfg.p));
    if (tpl.contains("degree"))
        cfg.tpl.degree = require_int(tpl, "degree", "template");
    if (tpl.contains("anchors")) {
        const auto& anch = tpl["anchors"];
        if (!anch.is_array())
            fail("template.anchors", "expected an array of reals");
        std::vector<double> anchors;
        for (const auto& a : anch) {
            if (!a.is_number())
                fail("template.anchors", "expected an array of reals");
            anchors.push_back(a.get<double>());
        }
        cfg.tpl.anchors = std::move(anchors);
    }
    if (cfg.tpl.kind == TemplateKind::kExplicit) {
        const auto& pts = require(tpl, "points", "template");
        if (!pts.is_array() || pts.empty())
            fail("template.points", "expected a nonempty array of points");
        for (size_t i = 0; i < pts.size(); ++i)
            cfg.tpl.points.push_back(parse_vector(pts[i], cfg.p, "template.points[" + std::to_string(i) + "]"));
    }

    const auto& init = require(root, "initial", "");
    cfg.x0 = parse_vector(require(init, "x0", "initial"), cfg.n, "initial.x0");
    cfg.xhat0 = parse_vector(require(init, "xhat0", "initial"), cfg.n, "initial.xhat0");
    const auto& s0json = require(init, "S0", "initial");
    if (s0json.is_string() && s0json.get<std::string>() == "identity") {
        cfg.s0 = Eigen::MatrixXd::Identity(cfg.n, cfg.n);
    } else if (s0json.is_array()) {
        cfg.s0 = parse_matrix(s0json, cfg.n, cfg.n, "initial.S0");
        if ((cfg.s0 - cfg.s0.transpose()).norm() > 1e-10 * std::max(1.0, cfg.s0.norm()))
            fail("initial.S0", "must be symmetric");
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cfg.s0, Eigen::EigenvaluesOnly);
        if (!(es.eigenvalues().minCoeff() > 0.0))
            fail("initial.S0", "must be positive-definite");
    } else {
        fail("initial.S0", "expected \"identity\" or an explicit matrix");
    }

    if (root.contains("certification")) {
        const auto& cert = root["certification"];
        cfg.certification.lambda_bar = require_number(cert, "lambda_bar", "certification");
        if (cfg.certification.lambda_bar < 0.0)
            fail("certification.lambda_bar", "must be nonnegative");
        if (cert.contains("mu_grid"))
            cfg.certification.mu_grid = require_int(cert, "mu_grid", "certification");
        if (cert.contains("rot_grid"))
            cfg.certification.rot_grid = require_int(cert, "rot_grid", "certification");
        if (cfg.certification.mu_grid < 1 || cfg.certification.rot_grid < 1)
            fail("certification", "grid sizes must be positive");
        if (cert.contains("seed")) {
            if (!cert["seed"].is_number_unsigned() && !cert["seed"].is_number_integer())
                fail("certification.seed", "expected an integer");
            cfg.certification.seed = cert["seed"].get<std::uint64_t>();
        }
    }
    if (root.contains("output")) {
        if (!root["output"].is_string())
            fail("output", "expected a path string");
        cfg.output_path = root["output"].get<std::string>();
    }

    // Assumption check: the pair (C(0), A(0)) must be observable.
    find_full_rank_minor(cfg.system());
    // The template must be constructible with these dimensions.
    cfg.family();
    return cfg;
}

std::string serialize_config(const ScenarioConfig& cfg) {
    ordered_json root;
    ordered_json sys;
    sys["n"] = cfg.n;
    sys["m"] = cfg.m;
    sys["p"] = cfg.p;
    ordered_json arows = ordered_json::array();
    for (int r = 0; r < cfg.n; ++r) {
        ordered_json row = ordered_json::array();
        for (int c = 0; c < cfg.n; ++c)
            row.push_back(poly_to_json(cfg.a(r, c)));
        arows.push_back(std::move(row));
    }
    sys["A"] = std::move(arows);
    ordered_json crows = ordered_json::array();
    for (int r = 0; r < cfg.m; ++r) {
        ordered_json row = ordered_json::array();
        for (int c = 0; c < cfg.n; ++c)
            row.push_back(poly_to_json(cfg.c(r, c)));
        crows.push_back(std::move(row));
    }
    sys["C"] = std::move(crows);
    ordered_json bentries = ordered_json::array();
    for (const auto& poly : cfg.b)
        bentries.push_back(poly_to_json(poly));
    sys["b"] = std::move(bentries);
    root["system"] = std::move(sys);

    ordered_json fb;
    fb["K"] = matrix_to_json(cfg.feedback_gain);
    if (cfg.saturation_radius)
        fb["saturation_radius"] = *cfg.saturation_radius;
    else
        fb["saturation_radius"] = nullptr;
    root["feedback"] = std::move(fb);

    root["theta"] = cfg.theta;
    root["delta"] = cfg.delta;
    root["t_final"] = cfg.t_final;
    root["substeps"] = cfg.substeps;

    ordered_json tpl;
    tpl["kind"] = to_string(cfg.tpl.kind);
    if (cfg.tpl.levels)
        tpl["N"] = *cfg.tpl.levels;
    if (cfg.tpl.degree)
        tpl["degree"] = *cfg.tpl.degree;
    if (cfg.tpl.anchors) {
        ordered_json anchors = ordered_json::array();
        for (double a : *cfg.tpl.anchors)
            anchors.push_back(a);
        tpl["anchors"] = std::move(anchors);
    }
    if (!cfg.tpl.points.empty()) {
        ordered_json pts = ordered_json::array();
        for (const auto& pt : cfg.tpl.points)
            pts.push_back(vector_to_json(pt));
        tpl["points"] = std::move(pts);
    }
    root["template"] = std::move(tpl);

    ordered_json init;
    init["x0"] = vector_to_json(cfg.x0);
    init["xhat0"] = vector_to_json(cfg.xhat0);
    if (cfg.s0.isIdentity(0.0))
        init["S0"] = "identity";
    else
        init["S0"] = matrix_to_json(cfg.s0);
    root["initial"] = std::move(init);

    ordered_json cert;
    cert["lambda_bar"] = cfg.certification.lambda_bar;
    cert["mu_grid"] = cfg.certification.mu_grid;
    cert["rot_grid"] = cfg.certification.rot_grid;
    cert["seed"] = cfg.certification.seed;
    root["certification"] = std::move(cert);

    root["output"] = cfg.output_path;
    return root.dump(2) + "\n";
}

} // namespace ctrltpl
