// Python bindings for the core operations: polynomial arithmetic, general
// position construction, Gramian / observability computations, template
// certification, the observer oracles, and the hybrid closed-loop
// simulation.

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ctrltpl/config.hpp"
#include "ctrltpl/genpos.hpp"
#include "ctrltpl/hybrid.hpp"
#include "ctrltpl/observer.hpp"

namespace py = pybind11;
using namespace ctrltpl;

namespace {

py::list poly_terms(const MultiPoly& poly) {
    py::list out;
    for (const auto& [e, c] : poly.terms())
        out.append(py::make_tuple(c, e));
    return out;
}

py::dict certificate_dict(const GeneralPositionCertificate& cert) {
    py::dict out;
    out["rank"] = cert.rank;
    out["min_singular_value"] = cert.min_singular_value;
    out["general_position"] = cert.general_position;
    out["minimal"] = cert.minimal;
    return out;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Control templates, observability Gramians, and hybrid observer feedback for state-affine systems";

    py::register_exception<Error>(m, "CtrltplError", PyExc_RuntimeError);

    py::class_<MultiPoly>(m, "MultiPoly")
        .def(py::init<int, std::vector<std::pair<double, Exponents>>>(), py::arg("num_vars"), py::arg("terms"))
        .def_static("constant", &MultiPoly::constant, py::arg("num_vars"), py::arg("value"))
        .def_static("variable", &MultiPoly::variable, py::arg("num_vars"), py::arg("index"))
        .def_property_readonly("num_vars", &MultiPoly::num_vars)
        .def("terms", &poly_terms)
        .def("degree", [](const MultiPoly& p) { return p.degree(); })
        .def("eval", &MultiPoly::eval, py::arg("u"))
        .def("__add__", [](const MultiPoly& a, const MultiPoly& b) { return a + b; })
        .def("__sub__", [](const MultiPoly& a, const MultiPoly& b) { return a - b; })
        .def("__mul__", [](const MultiPoly& a, const MultiPoly& b) { return a * b; })
        .def("__neg__", [](const MultiPoly& a) { return -a; })
        .def("__repr__", &MultiPoly::to_string);

    py::class_<StateAffineSystem>(m, "StateAffineSystem")
        .def_property_readonly("n", &StateAffineSystem::n)
        .def_property_readonly("m", &StateAffineSystem::m)
        .def_property_readonly("p", &StateAffineSystem::p)
        .def("A", &StateAffineSystem::a, py::arg("u"))
        .def("C", &StateAffineSystem::c, py::arg("u"))
        .def("b", &StateAffineSystem::b, py::arg("u"))
        .def("minor_degree_bound", &StateAffineSystem::minor_degree_bound);

    py::class_<InputSignal>(m, "InputSignal")
        .def(py::init<std::vector<double>, std::vector<Eigen::VectorXd>>(), py::arg("breakpoints"),
             py::arg("levels"))
        .def_static("constant", &InputSignal::constant, py::arg("level"), py::arg("t_end"), py::arg("t_begin") = 0.0)
        .def_property_readonly("breakpoints", &InputSignal::breakpoints)
        .def_property_readonly("levels", &InputSignal::levels)
        .def("value", &InputSignal::value, py::arg("s"));

    py::class_<TemplateFamily>(m, "TemplateFamily")
        .def_static("siso", &TemplateFamily::siso, py::arg("levels"), py::arg("t_max") = 1.0)
        .def_static("square", &TemplateFamily::square, py::arg("t_max") = 1.0)
        .def_static("from_general_position", &TemplateFamily::from_general_position, py::arg("d"), py::arg("p"),
                    py::arg("anchors"), py::arg("t_max") = 1.0)
        .def_property_readonly("points", &TemplateFamily::points)
        .def("signal", &TemplateFamily::signal, py::arg("delta"));

    m.def("coeffs_from_roots", &coeffs_from_roots, py::arg("roots"));
    m.def(
        "build_general_position",
        [](int d, int p, const std::vector<double>& anchors) {
            const auto set = build_general_position(d, p, anchors);
            py::dict out;
            out["points"] = set.points;
            out["normalized_points"] = normalize_to_template_origin(set);
            out["certificate"] = certificate_dict(verify_general_position(set));
            return out;
        },
        py::arg("d"), py::arg("p"), py::arg("anchors"));
    m.def(
        "verify_general_position",
        [](int d, int p, const std::vector<Eigen::VectorXd>& points) {
            return certificate_dict(verify_general_position(d, p, points));
        },
        py::arg("d"), py::arg("p"), py::arg("points"));

    m.def("load_system", [](const std::string& text) { return parse_config(text).system(); }, py::arg("config_json"));
    m.def(
        "kalman_determinant",
        [](const StateAffineSystem& sys) {
            const auto minor = find_full_rank_minor(sys);
            py::dict out;
            out["rows"] = minor.row_indices;
            out["det"] = poly_terms(minor.det);
            out["degree"] = minor.det.degree();
            out["degree_bound"] = minor.degree_bound;
            return out;
        },
        py::arg("sys"));
    m.def("transition_matrix", &transition_matrix, py::arg("sys"), py::arg("u"), py::arg("s"), py::arg("t"),
          py::arg("substeps") = kDefaultSubsteps);
    m.def("gramian", &gramian, py::arg("sys"), py::arg("u"), py::arg("s"), py::arg("t"),
          py::arg("substeps") = kDefaultSubsteps);
    m.def("observable_at", &observable_at, py::arg("sys"), py::arg("u"), py::arg("horizon"), py::arg("tol"),
          py::arg("substeps") = kDefaultSubsteps);

    m.def("siso_template", &siso_template, py::arg("delta"), py::arg("levels"));
    m.def("mimo_template", &mimo_template, py::arg("delta"), py::arg("points"));
    m.def("scaled_rotated", &scaled_rotated, py::arg("signal"), py::arg("mu"), py::arg("rotation"));
    m.def(
        "certify_template",
        [](const StateAffineSystem& sys, const TemplateFamily& family, double delta, double lambda_bar, int mu_grid,
           int rot_grid, std::uint64_t seed, int substeps) {
            const auto cert = certify_template(sys, family, delta, lambda_bar, mu_grid, rot_grid, seed, substeps);
            py::dict out;
            out["delta"] = cert.delta;
            out["lambda_bar"] = cert.lambda_bar;
            out["grid"] = cert.grid_description;
            out["g_estimate"] = cert.g_estimate;
            out["worst_mu"] = cert.worst_mu;
            out["worst_rotation"] = cert.worst_rotation;
            return out;
        },
        py::arg("sys"), py::arg("family"), py::arg("delta"), py::arg("lambda_bar"), py::arg("mu_grid"),
        py::arg("rot_grid"), py::arg("seed"), py::arg("substeps") = kDefaultSubsteps);

    m.def("steady_state_gain", &steady_state_gain, py::arg("sys"), py::arg("theta"));
    m.def("integrate_gain", &integrate_gain, py::arg("sys"), py::arg("u"), py::arg("s0"), py::arg("theta"),
          py::arg("t0"), py::arg("t"), py::arg("substeps") = kDefaultSubsteps);
    m.def("variation_of_constants_S", &variation_of_constants_S, py::arg("sys"), py::arg("u"), py::arg("s0"),
          py::arg("theta"), py::arg("t0"), py::arg("t"), py::arg("substeps") = kDefaultSubsteps);
    m.def("smin_lower_bound", &smin_lower_bound, py::arg("sys"), py::arg("u"), py::arg("theta"), py::arg("t0"),
          py::arg("t1"), py::arg("t"), py::arg("substeps") = kDefaultSubsteps);

    m.def("rotation_to", &rotation_to, py::arg("v"));
    m.def(
        "saturate",
        [](const Eigen::VectorXd& x, std::optional<double> rho) { return saturate(x, rho); },
        py::arg("x"), py::arg("rho") = std::nullopt);
    m.def(
        "simulate_scenario",
        [](const std::string& config_json) {
            const auto cfg = parse_config(config_json);
            const auto sys = cfg.system();
            const auto traj = simulate(sys, cfg.family(), cfg.feedback(), cfg.theta, cfg.delta, cfg.initial_state(),
                                       cfg.t_final, cfg.substeps);
            const size_t count = traj.samples.size();
            Eigen::VectorXd t(count), err_norm(count), mu(count);
            Eigen::MatrixXd x(count, cfg.n), xhat(count, cfg.n), u(count, cfg.p);
            Eigen::VectorXi j(count);
            for (size_t i = 0; i < count; ++i) {
                const auto& smp = traj.samples[i];
                t[i] = smp.t;
                j[i] = static_cast<int>(smp.j);
                err_norm[i] = smp.err.norm();
                mu[i] = smp.state.mu;
                x.row(i) = smp.state.x.transpose();
                xhat.row(i) = smp.state.xhat.transpose();
                u.row(i) = smp.u.transpose();
            }
            py::dict out;
            out["t"] = t;
            out["j"] = j;
            out["x"] = x;
            out["xhat"] = xhat;
            out["u"] = u;
            out["err_norm"] = err_norm;
            out["mu"] = mu;
            out["jump_times"] = traj.jump_times;
            return out;
        },
        py::arg("config_json"));
}
