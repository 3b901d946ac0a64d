#include "ctrltpl/templates.hpp"

#include <cmath>
#include <limits>
#include <random>

#include "ctrltpl/genpos.hpp"

namespace ctrltpl {

namespace {

constexpr double kAnchorPointTol = 1e-12;
constexpr double kOrthogonalityTol = 1e-10;

Eigen::VectorXd unit_first(int p) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(p);
    e[0] = 1.0;
    return e;
}

void check_anchor_point(const std::vector<Eigen::VectorXd>& points) {
    if (points.empty())
        throw ValidationError("template: point list is empty");
    const int p = static_cast<int>(points.front().size());
    for (const auto& pt : points)
        if (pt.size() != p)
            throw DimensionError("template: points disagree on dimension");
    if ((points.front() - unit_first(p)).norm() > kAnchorPointTol)
        throw ValidationError("template: points[0] must equal (1, 0, ..., 0)");
}

} // namespace

std::string to_string(TemplateKind kind) {
    switch (kind) {
    case TemplateKind::kSiso: return "siso";
    case TemplateKind::kGenpos: return "genpos";
    case TemplateKind::kSquare: return "square";
    case TemplateKind::kExplicit: return "explicit";
    }
    return "unknown";
}

TemplateFamily::TemplateFamily(TemplateKind kind, std::vector<Eigen::VectorXd> points, double t_max)
    : kind_(kind), points_(std::move(points)), t_max_(t_max) {
    check_anchor_point(points_);
    if (t_max_ <= 0.0)
        throw ArgumentError("TemplateFamily: t_max must be positive");
}

TemplateFamily TemplateFamily::siso(int levels, double t_max) {
    if (levels <= 0)
        throw ArgumentError("TemplateFamily::siso: level count must be positive");
    std::vector<Eigen::VectorXd> pts;
    for (int k = 0; k < levels; ++k) {
        Eigen::VectorXd v(1);
        v[0] = 1.0 + static_cast<double>(k) / levels;
        pts.push_back(v);
    }
    return TemplateFamily(TemplateKind::kSiso, std::move(pts), t_max);
}

TemplateFamily TemplateFamily::square(double t_max) {
    std::vector<Eigen::VectorXd> pts(4, Eigen::VectorXd(2));
    pts[0] << 1.0, 0.0;
    pts[1] << 1.0, 1.0;
    pts[2] << 2.0, 1.0;
    pts[3] << 2.0, 0.0;
    return TemplateFamily(TemplateKind::kSquare, std::move(pts), t_max);
}

TemplateFamily TemplateFamily::from_general_position(int d, int p, const std::vector<double>& anchors,
                                                     double t_max) {
    const auto set = build_general_position(d, p, anchors);
    return TemplateFamily(TemplateKind::kGenpos, normalize_to_template_origin(set), t_max);
}

TemplateFamily TemplateFamily::explicit_points(std::vector<Eigen::VectorXd> points, double t_max) {
    return TemplateFamily(TemplateKind::kExplicit, std::move(points), t_max);
}

double TemplateFamily::kappa(double delta) const {
    double dev = 0.0;
    for (const auto& pt : points_)
        dev = std::max(dev, (pt - points_.front()).norm());
    return delta * dev;
}

InputSignal TemplateFamily::signal(double delta) const { return mimo_template(delta, points_); }

InputSignal siso_template(double delta, int levels) {
    if (delta <= 0.0)
        throw ArgumentError("siso_template: delta must be positive");
    if (levels <= 0)
        throw ArgumentError("siso_template: level count must be positive");
    std::vector<double> bp;
    std::vector<Eigen::VectorXd> lv;
    for (int k = 0; k < levels; ++k) {
        bp.push_back(delta * k / levels);
        Eigen::VectorXd v(1);
        v[0] = 1.0 + delta * k / levels;
        lv.push_back(v);
    }
    bp.push_back(delta);
    return InputSignal(std::move(bp), std::move(lv));
}

InputSignal mimo_template(double delta, const std::vector<Eigen::VectorXd>& points) {
    if (delta <= 0.0)
        throw ArgumentError("mimo_template: delta must be positive");
    check_anchor_point(points);
    const int n_levels = static_cast<int>(points.size());
    std::vector<double> bp;
    std::vector<Eigen::VectorXd> lv;
    for (int k = 0; k < n_levels; ++k) {
        bp.push_back(delta * k / n_levels);
        lv.push_back(points[0] + delta * (points[k] - points[0]));
    }
    bp.push_back(delta);
    return InputSignal(std::move(bp), std::move(lv));
}

InputSignal scaled_rotated(const InputSignal& v, double mu, const Eigen::MatrixXd& rotation) {
    if (mu < 0.0)
        throw ArgumentError("scaled_rotated: mu must be nonnegative");
    const int p = v.dims();
    if (rotation.rows() != p || rotation.cols() != p)
        throw DimensionError("scaled_rotated: rotation shape does not match the signal dimension");
    const double defect = (rotation.transpose() * rotation - Eigen::MatrixXd::Identity(p, p)).norm();
    if (defect > kOrthogonalityTol)
        throw ValidationError("scaled_rotated: matrix is not orthogonal (defect " + std::to_string(defect) + ")");
    std::vector<Eigen::VectorXd> lv;
    lv.reserve(v.levels().size());
    for (const auto& level : v.levels())
        lv.push_back(mu * (rotation * level));
    return InputSignal(v.breakpoints(), std::move(lv));
}

std::vector<Eigen::MatrixXd> orthogonal_samples(int p, int count, std::uint64_t seed) {
    std::vector<Eigen::MatrixXd> out;
    if (p == 1) {
        out.push_back(Eigen::MatrixXd::Constant(1, 1, 1.0));
        out.push_back(Eigen::MatrixXd::Constant(1, 1, -1.0));
        return out;
    }
    if (p == 2) {
        const Eigen::MatrixXd reflect = Eigen::Vector2d(1.0, -1.0).asDiagonal();
        for (int i = 0; i < count; ++i) {
            const double phi = 2.0 * M_PI * i / count;
            Eigen::MatrixXd rot(2, 2);
            rot << std::cos(phi), -std::sin(phi), std::sin(phi), std::cos(phi);
            out.push_back(rot);
            out.push_back(rot * reflect);
        }
        return out;
    }
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int i = 0; i < count; ++i) {
        Eigen::MatrixXd g(p, p);
        for (int r = 0; r < p; ++r)
            for (int c = 0; c < p; ++c)
                g(r, c) = gauss(rng);
        Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
        Eigen::MatrixXd q = qr.householderQ();
        out.push_back(q);
    }
    return out;
}

TemplateCertificate certify_template(const StateAffineSystem& sys, const TemplateFamily& family, double delta,
                                     double lambda_bar, int mu_grid, int rot_grid, std::uint64_t seed,
                                     int substeps) {
    if (delta <= 0.0 || delta > family.t_max())
        throw ArgumentError("certify_template: delta outside (0, " + std::to_string(family.t_max()) + "]");
    if (lambda_bar < 0.0)
        throw ArgumentError("certify_template: lambda_bar must be nonnegative");
    if (mu_grid < 1 || rot_grid < 1)
        throw ArgumentError("certify_template: grid sizes must be positive");
    if (family.dims() != sys.p())
        throw DimensionError("certify_template: family dimension " + std::to_string(family.dims()) +
                             " does not match the system's " + std::to_string(sys.p()) + " inputs");

    const InputSignal base = family.signal(delta);
    const auto rotations = orthogonal_samples(sys.p(), rot_grid, seed);

    TemplateCertificate cert;
    cert.delta = delta;
    cert.lambda_bar = lambda_bar;
    cert.mu_grid = mu_grid;
    cert.rot_grid = rot_grid;
    cert.seed = seed;
    cert.grid_description = std::to_string(mu_grid + 1) + " scalings in [0, " + std::to_string(lambda_bar) + "] x " +
                            std::to_string(rotations.size()) + " orthogonal samples (p = " + std::to_string(sys.p()) +
                            ")";
    cert.g_estimate = std::numeric_limits<double>::infinity();

    for (int i = 0; i <= mu_grid; ++i) {
        const double mu = lambda_bar * i / mu_grid;
        for (const auto& rot : rotations) {
            const InputSignal sig = scaled_rotated(base, mu, rot);
            const Eigen::MatrixXd gam = gramian(sys, sig, 0.0, delta, substeps);
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gam, Eigen::EigenvaluesOnly);
            const double lmin = es.eigenvalues().minCoeff();
            if (lmin < cert.g_estimate) {
                cert.g_estimate = lmin;
                cert.worst_mu = mu;
                cert.worst_rotation = rot;
            }
        }
    }
    return cert;
}

} // namespace ctrltpl
