#include "danneal/objective.hpp"

#include "danneal/numdiff.hpp"
#include "danneal/rng.hpp"
#include "danneal/smooth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <random>
#include <sstream>
#include <stdexcept>

namespace danneal {

namespace {

void check_g_args(double y, double r, double eps) {
    if (!(y >= 0.0)) throw std::domain_error("g: y must be nonnegative");
    if (!(r > 0.0)) throw std::domain_error("g: r must be positive");
    if (!(eps > 0.0 && eps < 0.5 * r)) {
        throw std::invalid_argument("g: eps must lie in (0, r/2)");
    }
}

}  // namespace

double g_value(double y, double r, double eps) {
    check_g_args(y, r, eps);
    const double a = 0.5 * r - eps;  // bridge start
    if (y <= a) return -y * y + 0.25 * r * r;
    if (y >= 0.5 * r) {
        const double u = y - r;
        return u * u;
    }
    const double s = (y - a) / eps;
    const double w = smoothstep(s);
    const double p_in = -y * y + 0.25 * r * r;
    const double p_out = (y - r) * (y - r);
    return p_in + w * (p_out - p_in);
}

double g_deriv(double y, double r, double eps, int order) {
    check_g_args(y, r, eps);
    if (order < 1 || order > 3) throw std::invalid_argument("g_deriv: order must be 1, 2, or 3");
    const double a = 0.5 * r - eps;
    if (y <= a) {
        switch (order) {
            case 1: return -2.0 * y;
            case 2: return -2.0;
            default: return 0.0;
        }
    }
    if (y >= 0.5 * r) {
        switch (order) {
            case 1: return 2.0 * (y - r);
            case 2: return 2.0;
            default: return 0.0;
        }
    }
    // Bridge: G = p_in + w q with q = p_out - p_in and w = h(s). Product
    // rule in y, with d^k w / dy^k = h^(k)(s) / eps^k.
    const double s = (y - a) / eps;
    const double q = (y - r) * (y - r) - (-y * y + 0.25 * r * r);
    const double q1 = 4.0 * y - 2.0 * r;
    const double q2 = 4.0;
    const double w = smoothstep(s);
    const double w1 = smoothstep_deriv(s, 1) / eps;
    const double w2 = smoothstep_deriv(s, 2) / (eps * eps);
    const double w3 = smoothstep_deriv(s, 3) / (eps * eps * eps);
    switch (order) {
        case 1: return -2.0 * y + w1 * q + w * q1;
        case 2: return -2.0 + w2 * q + 2.0 * w1 * q1 + w * q2;
        default: return w3 * q + 3.0 * w2 * q1 + 3.0 * w1 * q2;
    }
}

double f_value(const Eigen::Vector2d& x, double r, double eps) {
    return g_value(x.norm(), r, eps);
}

Eigen::Vector2d f_grad(const Eigen::Vector2d& x, double r, double eps) {
    check_g_args(0.0, r, eps);
    const double y = x.norm();
    // On the inner branch the gradient is exactly -2x, which also covers the
    // origin where x/|x| is undefined.
    if (y <= 0.5 * r - eps) return -2.0 * x;
    return (g_deriv(y, r, eps, 1) / y) * x;
}

// --- SensorField ------------------------------------------------------------

Eigen::VectorXd SensorField::stacked_targets() const {
    Eigen::VectorXd z(dim());
    for (int k = 0; k < n_targets(); ++k) z.segment<2>(2 * k) = targets.row(k).transpose();
    return z;
}

SensorField SensorField::from_ground_truth(Eigen::Matrix<double, Eigen::Dynamic, 2> sensors,
                                           Eigen::Matrix<double, Eigen::Dynamic, 2> targets,
                                           double region_radius, double eps, bool inner_only) {
    SensorField field;
    field.sensors = std::move(sensors);
    field.targets = std::move(targets);
    field.region_radius = region_radius;
    field.inner_only = inner_only;
    field.distances.resize(field.n_sensors(), field.n_targets());
    for (int n = 0; n < field.n_sensors(); ++n) {
        for (int k = 0; k < field.n_targets(); ++k) {
            field.distances(n, k) = (field.targets.row(k) - field.sensors.row(n)).norm();
        }
    }
    field.bridge_eps = eps > 0.0 ? eps : 0.125 * field.distances.minCoeff();
    field.validate();
    return field;
}

std::vector<std::string> SensorField::violations() const {
    std::vector<std::string> v;
    if (n_sensors() < 1) v.push_back("need at least one sensor");
    if (n_targets() < 1) v.push_back("need at least one target");
    if (!(region_radius > 0.0)) v.push_back("region_radius must be positive");
    if (distances.rows() != n_sensors() || distances.cols() != n_targets()) {
        v.push_back("distance matrix shape must be n_sensors x n_targets");
        return v;
    }
    double min_d = std::numeric_limits<double>::infinity();
    for (int n = 0; n < n_sensors(); ++n) {
        for (int k = 0; k < n_targets(); ++k) {
            const double exact = (targets.row(k) - sensors.row(n)).norm();
            if (std::abs(distances(n, k) - exact) > 1e-9 * (1.0 + exact)) {
                v.push_back("distances must match the ground-truth geometry");
            }
            if (!(distances(n, k) > 0.0)) v.push_back("a sensor coincides with a target");
            min_d = std::min(min_d, distances(n, k));
        }
    }
    if (!(bridge_eps > 0.0 && bridge_eps < 0.5 * min_d)) {
        v.push_back("bridge_eps must lie in (0, min distance / 2)");
    }
    // The deployment region: every sensor and target inside a ball of
    // diameter region_radius (max pairwise distance <= R).
    double diameter = 0.0;
    Eigen::Matrix<double, Eigen::Dynamic, 2> pts(n_sensors() + n_targets(), 2);
    pts << sensors, targets;
    for (int i = 0; i < pts.rows(); ++i) {
        for (int j = i + 1; j < pts.rows(); ++j) {
            diameter = std::max(diameter, (pts.row(i) - pts.row(j)).norm());
        }
    }
    if (diameter > region_radius) v.push_back("deployment diameter exceeds region_radius");
    // The stacked ground truth must sit in the inner regime, or it would be
    // distorted by the radial blend and stop being the minimum.
    if (n_targets() > 0) {
        Eigen::VectorXd z(2 * n_targets());
        for (int k = 0; k < n_targets(); ++k) z.segment<2>(2 * k) = targets.row(k).transpose();
        if (!(z.norm() / n_targets() < region_radius)) {
            v.push_back("stacked ground truth must lie in the inner regime");
        }
    }
    return v;
}

void SensorField::validate() const {
    const auto v = violations();
    if (v.empty()) return;
    std::ostringstream msg;
    msg << "invalid sensor field:";
    for (const auto& s : v) msg << " [" << s << "]";
    throw std::invalid_argument(msg.str());
}

SensorField pentagon_field(bool inner_only) {
    Eigen::Matrix<double, Eigen::Dynamic, 2> sensors(5, 2);
    for (int n = 0; n < 5; ++n) {
        const double angle = 2.0 * M_PI * n / 5.0;
        sensors.row(n) << std::cos(angle), std::sin(angle);
    }
    Eigen::Matrix<double, Eigen::Dynamic, 2> targets(1, 2);
    targets << 0.25, 0.35;
    return SensorField::from_ground_truth(sensors, targets, 3.0, 0.0, inner_only);
}

SensorField colinear_field(bool inner_only) {
    Eigen::Matrix<double, Eigen::Dynamic, 2> sensors(5, 2);
    sensors << -1.0, 0.0, -0.5, 0.0, 0.0, 0.0, 0.5, 0.0, 1.0, 0.0;
    Eigen::Matrix<double, Eigen::Dynamic, 2> targets(1, 2);
    targets << 0.25, 0.0;  // on the sensor line: the minimum degenerates
    return SensorField::from_ground_truth(sensors, targets, 3.0, 0.0, inner_only);
}

// --- Per-agent cost ----------------------------------------------------------

namespace {

void check_un_args(const SensorField& field, int n, const Eigen::VectorXd& x) {
    if (n < 0 || n >= field.n_sensors()) throw std::out_of_range("agent index out of range");
    if (x.size() != field.dim()) {
        throw std::invalid_argument("state dimension must be 2 * n_targets");
    }
}

double region_sum(const SensorField& field, int n, const Eigen::VectorXd& x) {
    double acc = 0.0;
    for (int k = 0; k < field.n_targets(); ++k) {
        const Eigen::Vector2d rel = x.segment<2>(2 * k) - field.sensors.row(n).transpose();
        acc += g_value(rel.norm(), field.distances(n, k), field.bridge_eps);
    }
    return acc;
}

Eigen::VectorXd region_sum_grad(const SensorField& field, int n, const Eigen::VectorXd& x) {
    Eigen::VectorXd g(x.size());
    for (int k = 0; k < field.n_targets(); ++k) {
        const Eigen::Vector2d rel = x.segment<2>(2 * k) - field.sensors.row(n).transpose();
        g.segment<2>(2 * k) = f_grad(rel, field.distances(n, k), field.bridge_eps);
    }
    return g;
}

}  // namespace

double un_value(const SensorField& field, int n, const Eigen::VectorXd& x) {
    check_un_args(field, n, x);
    if (field.inner_only) return region_sum(field, n, x);
    const double rho = x.norm() / field.n_targets();
    const double R = field.region_radius;
    if (rho < R) return region_sum(field, n, x);
    if (rho >= R + 1.0) return x.squaredNorm();
    const double w = smoothstep(rho - R);
    return (1.0 - w) * region_sum(field, n, x) + w * x.squaredNorm();
}

Eigen::VectorXd un_grad(const SensorField& field, int n, const Eigen::VectorXd& x) {
    check_un_args(field, n, x);
    if (field.inner_only) return region_sum_grad(field, n, x);
    const double norm = x.norm();
    const double T = field.n_targets();
    const double rho = norm / T;
    const double R = field.region_radius;
    if (rho < R) return region_sum_grad(field, n, x);
    if (rho >= R + 1.0) return 2.0 * x;
    const double w = smoothstep(rho - R);
    const double w1 = smoothstep_deriv(rho - R, 1);
    const double inner = region_sum(field, n, x);
    // grad rho = x / (T |x|); |x| > 0 throughout the blend band since R > 0.
    return (1.0 - w) * region_sum_grad(field, n, x) + (2.0 * w) * x +
           (w1 * (x.squaredNorm() - inner) / (T * norm)) * x;
}

// --- ObjectiveSet ------------------------------------------------------------

double ObjectiveSet::value(const Eigen::VectorXd& x) const {
    double acc = 0.0;
    for (const auto& fn : agent_value) acc += fn(x);
    return acc;
}

Eigen::VectorXd ObjectiveSet::gradient(const Eigen::VectorXd& x) const {
    Eigen::VectorXd g = Eigen::VectorXd::Zero(dim);
    for (const auto& fn : agent_grad) g += fn(x);
    return g;
}

std::optional<double> ObjectiveSet::distance_to_minimizer(const Eigen::VectorXd& x) const {
    if (minimizers.empty()) return std::nullopt;
    double best = std::numeric_limits<double>::infinity();
    for (const auto& m : minimizers) best = std::min(best, (x - m).norm());
    return best;
}

ObjectiveSet make_localization(const SensorField& field) {
    field.validate();
    const auto shared = std::make_shared<const SensorField>(field);
    ObjectiveSet set;
    set.n_agents = field.n_sensors();
    set.dim = field.dim();
    for (int n = 0; n < set.n_agents; ++n) {
        set.agent_value.emplace_back(
            [shared, n](const Eigen::VectorXd& x) { return un_value(*shared, n, x); });
        set.agent_grad.emplace_back(
            [shared, n](const Eigen::VectorXd& x) { return un_grad(*shared, n, x); });
    }
    set.minimizers.push_back(field.stacked_targets());
    set.seam_scan = [shared] { return scan_seams(*shared).max_rel_gap; };
    return set;
}

ObjectiveSet make_quadratic(int dim, const Eigen::VectorXd& center, int n_agents) {
    if (dim < 1) throw std::invalid_argument("make_quadratic: dim must be >= 1");
    if (n_agents < 1) throw std::invalid_argument("make_quadratic: n_agents must be >= 1");
    if (center.size() != dim) throw std::invalid_argument("make_quadratic: center has wrong size");
    ObjectiveSet set;
    set.n_agents = n_agents;
    set.dim = dim;
    for (int n = 0; n < n_agents; ++n) {
        set.agent_value.emplace_back(
            [center](const Eigen::VectorXd& x) { return (x - center).squaredNorm(); });
        set.agent_grad.emplace_back(
            [center](const Eigen::VectorXd& x) -> Eigen::VectorXd { return 2.0 * (x - center); });
    }
    set.minimizers.push_back(center);
    return set;
}

ObjectiveSet make_double_well(double scale, int n_agents) {
    if (!(scale > 0.0)) throw std::invalid_argument("make_double_well: scale must be positive");
    if (n_agents < 1) throw std::invalid_argument("make_double_well: n_agents must be >= 1");
    ObjectiveSet set;
    set.n_agents = n_agents;
    set.dim = 1;
    for (int n = 0; n < n_agents; ++n) {
        set.agent_value.emplace_back([scale](const Eigen::VectorXd& x) {
            const double u = x(0) * x(0) - 1.0;
            return scale * u * u;
        });
        set.agent_grad.emplace_back([scale](const Eigen::VectorXd& x) -> Eigen::VectorXd {
            Eigen::VectorXd g(1);
            g(0) = scale * 4.0 * x(0) * (x(0) * x(0) - 1.0);
            return g;
        });
    }
    set.minimizers.push_back(-Eigen::VectorXd::Ones(1));
    set.minimizers.push_back(Eigen::VectorXd::Ones(1));
    return set;
}

// --- Seam certification --------------------------------------------------------

namespace {

// Second derivative of t -> un_value(field, n, t*v) along a unit ray v,
// assembled from the analytic kernel derivatives. phi = (1-W) S + W t^2 with
// W(t) = smoothstep(t/T - R), S(t) = sum_k g(|t v_k - s_n|):
//
//   phi'' = (1-W) S'' - 2 W' S' - W'' S + W'' t^2 + 4 t W' + 2 W
//
// where y_k(t) = |t v_k - s_n| has y' = (t |v_k|^2 - v_k . s_n)/y and
// y'' = (|v_k|^2 - y'^2)/y, and g' / y stays finite through y = 0 on the
// inner branch.
double ray_second_derivative(const SensorField& field, int n, const Eigen::VectorXd& v,
                             double t) {
    const double T = field.n_targets();
    const Eigen::Vector2d sensor = field.sensors.row(n).transpose();
    double S = 0.0, S1 = 0.0, S2 = 0.0;
    for (int k = 0; k < field.n_targets(); ++k) {
        const Eigen::Vector2d vk = v.segment<2>(2 * k);
        const Eigen::Vector2d rel = t * vk - sensor;
        const double y = rel.norm();
        const double r = field.distances(n, k);
        const double eps = field.bridge_eps;
        S += g_value(y, r, eps);
        if (y < 1e-12) {
            // Ray grazes the sensor: inner branch, g' / y = -2 and y y'' term
            // reduces to |v_k|^2 times that.
            S2 += -2.0 * vk.squaredNorm();
            continue;
        }
        const double y1 = (t * vk.squaredNorm() - vk.dot(sensor)) / y;
        const double gp = g_deriv(y, r, eps, 1);
        const double gpp = g_deriv(y, r, eps, 2);
        const double gp_over_y = y <= 0.5 * r - eps ? -2.0 : gp / y;
        S1 += gp * y1;
        S2 += gpp * y1 * y1 + gp_over_y * (vk.squaredNorm() - y1 * y1);
    }
    if (field.inner_only) return S2;
    const double s = t / T - field.region_radius;
    if (s <= 0.0) return S2;
    if (s >= 1.0) return 2.0;
    const double W = smoothstep(s);
    const double W1 = smoothstep_deriv(s, 1) / T;
    const double W2 = smoothstep_deriv(s, 2) / (T * T);
    return (1.0 - W) * S2 - 2.0 * W1 * S1 - W2 * S + W2 * t * t + 4.0 * t * W1 + 2.0 * W;
}

struct SeamProbe {
    std::string where;
    std::function<double(double)> value, d1, d2;  // d2 may be null
    double y0 = 0.0;
    double h = 0.0;
};

void record(SeamReport& report, const SeamProbe& probe) {
    const SeamJet left = onesided_jet(probe.value, probe.d1, probe.d2, probe.y0, probe.h, -1);
    const SeamJet right = onesided_jet(probe.value, probe.d1, probe.d2, probe.y0, probe.h, +1);
    for (int order = 0; order <= 3; ++order) {
        SeamReport::Entry e;
        e.where = probe.where;
        e.order = order;
        e.left = left.deriv[order];
        e.right = right.deriv[order];
        e.gap = rel_gap(left.deriv[order], right.deriv[order]);
        report.max_rel_gap = std::max(report.max_rel_gap, e.gap);
        report.entries.push_back(e);
    }
}

// Keep only the worst entry per (seam label prefix, order).
void compress(SeamReport& report) {
    std::vector<SeamReport::Entry> kept;
    for (const auto& e : report.entries) {
        const std::string prefix = e.where.substr(0, e.where.find(' '));
        bool merged = false;
        for (auto& k : kept) {
            if (k.order == e.order && k.where.substr(0, k.where.find(' ')) == prefix) {
                if (e.gap > k.gap) k = e;
                merged = true;
                break;
            }
        }
        if (!merged) kept.push_back(e);
    }
    report.entries = std::move(kept);
}

}  // namespace

SeamReport scan_seams(const SensorField& field, int directions, std::uint64_t seed) {
    field.validate();
    SeamReport report;

    // Kernel seams, one pair per (sensor, target).
    for (int n = 0; n < field.n_sensors(); ++n) {
        for (int k = 0; k < field.n_targets(); ++k) {
            const double r = field.distances(n, k);
            const double eps = field.bridge_eps;
            auto value = [r, eps](double y) { return g_value(y, r, eps); };
            auto d1 = [r, eps](double y) { return g_deriv(y, r, eps, 1); };
            auto d2 = [r, eps](double y) { return g_deriv(y, r, eps, 2); };
            for (const double y0 : {0.5 * r - eps, 0.5 * r}) {
                std::ostringstream where;
                where << "kernel" << (y0 < 0.5 * r ? "-lo" : "-hi") << " (n=" << n << ", k=" << k
                      << ", y=" << y0 << ")";
                // The bridge's high derivatives grow like 1/eps^k, so the
                // probe step must shrink with eps or truncation swamps the
                // order-3 comparison. The analytic d2 keeps roundoff benign
                // at steps this small.
                const double h = std::max(1e-5 * eps, 1e-8 * (1.0 + y0));
                record(report, {where.str(), value, d1, d2, y0, h});
            }
        }
    }

    // Radial seams along sampled rays (absent from the inner-only form).
    if (!field.inner_only) {
        std::mt19937_64 rng = substream(seed, 0, kStreamChecker);
        std::normal_distribution<double> gauss;
        const int dim = field.dim();
        const double T = field.n_targets();
        for (int n = 0; n < field.n_sensors(); ++n) {
            for (int j = 0; j < directions; ++j) {
                Eigen::VectorXd v(dim);
                for (int i = 0; i < dim; ++i) v(i) = gauss(rng);
                v.normalize();
                auto value = [&field, n, v](double t) -> double {
                    return un_value(field, n, t * v);
                };
                auto d1 = [&field, n, v](double t) -> double {
                    return un_grad(field, n, t * v).dot(v);
                };
                auto d2 = [&field, n, v](double t) -> double {
                    return ray_second_derivative(field, n, v, t);
                };
                for (const double rho0 : {field.region_radius, field.region_radius + 1.0}) {
                    const double t0 = rho0 * T;
                    std::ostringstream where;
                    where << "radial" << (rho0 < field.region_radius + 0.5 ? "-lo" : "-hi")
                          << " (n=" << n << ", dir=" << j << ")";
                    record(report, {where.str(), value, d1, d2, t0, 1e-4});
                }
            }
        }
    }

    compress(report);
    return report;
}

}  // namespace danneal
