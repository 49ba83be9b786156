#include "danneal/checker.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <random>
#include <sstream>

#include "danneal/numdiff.hpp"
#include "danneal/rng.hpp"

namespace danneal {

const char* to_string(CheckStatus status) {
    switch (status) {
        case CheckStatus::Pass: return "pass";
        case CheckStatus::Fail: return "fail";
        default: return "inconclusive";
    }
}

const Witness* CheckResult::find(const std::string& key) const {
    for (const auto& w : witnesses) {
        if (w.key == key) return &w;
    }
    return nullptr;
}

namespace {

// Distinct substream per operation so the checks stay independent of each
// other's draw counts.
enum : std::uint64_t {
    kOpLipschitz = 1,
    kOpDissimilarity,
    kOpCoercivity,
    kOpLaplacian,
    kOpAlignment,
    kOpGrowth,
};

struct Sampler {
    std::mt19937_64 rng;
    std::normal_distribution<double> gauss;
    std::uniform_real_distribution<double> unif{0.0, 1.0};
    int dim;

    Sampler(std::uint64_t seed, std::uint64_t op, int dim_)
        : rng(substream(seed, 0, kStreamChecker, op)), dim(dim_) {}

    Eigen::VectorXd direction() {
        Eigen::VectorXd u(dim);
        do {
            for (int i = 0; i < dim; ++i) u(i) = gauss(rng);
        } while (u.norm() == 0.0);
        u.normalize();
        return u;
    }

    // Uniform over the annulus r_min <= |x| <= r_max.
    Eigen::VectorXd in_annulus(double r_min, double r_max) {
        const double a = std::pow(r_min, dim), b = std::pow(r_max, dim);
        const double r = std::pow(a + unif(rng) * (b - a), 1.0 / dim);
        return r * direction();
    }
};

std::string at_radius(const char* prefix, double r) {
    std::ostringstream key;
    key << prefix << "@" << r;
    return key.str();
}

// Least-squares line y = a + s x; returns {slope, r_squared}.
std::pair<double, double> fit_line(const std::vector<double>& xs, const std::vector<double>& ys) {
    const double n = static_cast<double>(xs.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    for (size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
        syy += ys[i] * ys[i];
    }
    const double var_x = sxx - sx * sx / n;
    const double var_y = syy - sy * sy / n;
    const double cov = sxy - sx * sy / n;
    const double slope = var_x > 0 ? cov / var_x : 0.0;
    const double r2 = var_x > 0 && var_y > 0 ? (cov * cov) / (var_x * var_y) : 0.0;
    return {slope, r2};
}

}  // namespace

CheckResult check_lipschitz(const ObjectiveSet& objective, double region_radius, int samples,
                            std::uint64_t seed, double min_radius) {
    if (samples < 1000) throw std::invalid_argument("check_lipschitz: need at least 1000 samples");
    if (!(region_radius > min_radius && min_radius >= 0.0)) {
        throw std::invalid_argument("check_lipschitz: bad sampling region");
    }
    Sampler sampler(seed, kOpLipschitz, objective.dim);

    double estimate = 0.0, half_estimate = 0.0;
    for (int i = 0; i < 2 * samples; ++i) {
        const Eigen::VectorXd x = sampler.in_annulus(min_radius, region_radius);
        std::vector<Eigen::VectorXd> partners;
        // One far partner probes the global quotient; nearby partners at
        // shrinking offsets close in on the local derivative of the gradient.
        partners.push_back(sampler.in_annulus(min_radius, region_radius));
        for (const double scale : {1e-2, 1e-3, 1e-4}) {
            Eigen::VectorXd other = x + scale * (1.0 + x.norm()) * sampler.direction();
            const double r = other.norm();
            if (r > region_radius || r < min_radius) other = 2.0 * x - other;
            partners.push_back(std::move(other));
        }
        for (const auto& other : partners) {
            const double gap = (x - other).norm();
            if (gap == 0.0) continue;
            for (int n = 0; n < objective.n_agents; ++n) {
                const double slope =
                    (objective.agent_grad[n](x) - objective.agent_grad[n](other)).norm() / gap;
                estimate = std::max(estimate, slope);
            }
        }
        if (i + 1 == samples) half_estimate = estimate;
    }

    CheckResult result;
    result.name = "lipschitz-gradient";
    result.witnesses = {{"estimate", estimate},
                        {"half-sample-estimate", half_estimate},
                        {"growth", half_estimate > 0 ? estimate / half_estimate : 1.0}};
    if (!std::isfinite(estimate)) {
        result.status = CheckStatus::Fail;
        result.note = "gradient difference quotient is not finite";
    } else if (estimate <= 1.1 * half_estimate || estimate < 1e-12) {
        result.status = CheckStatus::Pass;
        result.note = "difference quotient stable under sample doubling";
    } else {
        result.status = CheckStatus::Inconclusive;
        result.note = "difference quotient still growing with sample count";
    }
    return result;
}

CheckResult check_dissimilarity(const ObjectiveSet& objective, const std::vector<double>& radii,
                                int samples, std::uint64_t seed) {
    if (radii.size() < 3) throw std::invalid_argument("check_dissimilarity: need at least 3 radii");
    if (!std::is_sorted(radii.begin(), radii.end())) {
        throw std::invalid_argument("check_dissimilarity: radii must be sorted ascending");
    }
    Sampler sampler(seed, kOpDissimilarity, objective.dim);

    std::vector<double> sup_sum(radii.size(), 0.0), sup_avg(radii.size(), 0.0);
    for (size_t j = 0; j < radii.size(); ++j) {
        for (int i = 0; i < samples; ++i) {
            // Alternate sphere and interior points: the sup usually lives on
            // the boundary but must not be assumed there.
            const Eigen::VectorXd x =
                i % 2 == 0 ? (radii[j] * sampler.direction()).eval() : sampler.in_annulus(0, radii[j]);
            const Eigen::VectorXd total = objective.gradient(x);
            for (int n = 0; n < objective.n_agents; ++n) {
                const Eigen::VectorXd gn = objective.agent_grad[n](x);
                sup_sum[j] = std::max(sup_sum[j], (gn - total).norm());
                sup_avg[j] = std::max(sup_avg[j], (gn - total / objective.n_agents).norm());
            }
        }
    }

    const auto [slope, r2] = fit_line(radii, sup_sum);
    CheckResult result;
    result.name = "gradient-dissimilarity";
    for (size_t j = 0; j < radii.size(); ++j) {
        result.witnesses.push_back({at_radius("sup", radii[j]), sup_sum[j]});
        result.witnesses.push_back({at_radius("avg-sup", radii[j]), sup_avg[j]});
    }
    result.witnesses.push_back({"slope", slope});
    result.witnesses.push_back({"r2", r2});

    const double last = sup_sum.back();
    const double prev = sup_sum[sup_sum.size() - 2];
    if (last < 1e-9 || last <= 1.05 * prev) {
        result.status = CheckStatus::Pass;
        result.note = "dissimilarity flattens with radius";
    } else if (r2 >= 0.9 && last >= 1.4 * prev) {
        result.status = CheckStatus::Fail;
        result.note = "dissimilarity grows linearly with radius; no uniform bound in sight";
    } else {
        result.status = CheckStatus::Inconclusive;
        result.note = "dissimilarity neither flattens nor grows cleanly";
    }
    return result;
}

CheckResult check_coercivity(const ObjectiveSet& objective, const std::vector<double>& radii,
                             int directions, std::uint64_t seed) {
    if (radii.size() < 2 || !std::is_sorted(radii.begin(), radii.end())) {
        throw std::invalid_argument("check_coercivity: need ascending radii");
    }
    if (directions < 16) throw std::invalid_argument("check_coercivity: need >= 16 directions");
    Sampler sampler(seed, kOpCoercivity, objective.dim);

    std::vector<double> u_min(radii.size()), g_min(radii.size());
    for (size_t j = 0; j < radii.size(); ++j) {
        u_min[j] = g_min[j] = std::numeric_limits<double>::infinity();
        for (int i = 0; i < directions; ++i) {
            const Eigen::VectorXd x = radii[j] * sampler.direction();
            u_min[j] = std::min(u_min[j], objective.value(x));
            g_min[j] = std::min(g_min[j], objective.gradient(x).norm());
        }
    }

    double inner_min;
    double inner_tol;
    std::string inner_note;
    if (!objective.minimizers.empty()) {
        inner_min = std::numeric_limits<double>::infinity();
        for (const auto& m : objective.minimizers) {
            inner_min = std::min(inner_min, objective.value(m));
        }
        inner_tol = 1e-8;
        inner_note = "known minimizers";
    } else {
        // Coarse random search: only a sanity bound, hence the loose tolerance.
        inner_min = std::numeric_limits<double>::infinity();
        for (int i = 0; i < 4096; ++i) {
            inner_min = std::min(inner_min, objective.value(sampler.in_annulus(0, radii.front())));
        }
        inner_tol = 1e-2;
        inner_note = "coarse random search (no known minimizers)";
    }

    bool increasing = true;
    for (size_t j = 1; j < radii.size(); ++j) {
        increasing = increasing && u_min[j] > u_min[j - 1] && g_min[j] > g_min[j - 1];
    }

    CheckResult result;
    result.name = "coercivity";
    for (size_t j = 0; j < radii.size(); ++j) {
        result.witnesses.push_back({at_radius("min-u", radii[j]), u_min[j]});
        result.witnesses.push_back({at_radius("min-grad", radii[j]), g_min[j]});
    }
    result.witnesses.push_back({"inner-min", inner_min});
    if (increasing && std::abs(inner_min) <= inner_tol) {
        result.status = CheckStatus::Pass;
        result.note = "sphere minima of U and |grad U| strictly increasing; minimum level 0 (" +
                      inner_note + ")";
    } else {
        result.status = CheckStatus::Fail;
        result.note = increasing ? "minimum level is not 0 (" + inner_note + ")"
                                 : "sphere minima fail to increase with radius";
    }
    return result;
}

CheckResult check_laplacian_gap(const ObjectiveSet& objective, const std::vector<double>& radii,
                                int samples, std::uint64_t seed) {
    if (radii.empty() || !std::is_sorted(radii.begin(), radii.end())) {
        throw std::invalid_argument("check_laplacian_gap: need ascending radii");
    }
    Sampler sampler(seed, kOpLaplacian, objective.dim);
    const auto grad = [&objective](const Eigen::VectorXd& x) { return objective.gradient(x); };
    const auto gap_at = [&](const Eigen::VectorXd& x) {
        const double h = 1e-4 * (1.0 + x.norm());
        return objective.gradient(x).squaredNorm() - divergence_from_gradient(grad, x, h);
    };

    // Deterministic dense scan of the inner box where the interesting minima
    // live (dim <= 2); random fallback above.
    const double r0 = radii.front();
    double inner_min = std::numeric_limits<double>::infinity();
    if (objective.dim == 1) {
        const int steps = 4096;
        for (int i = 0; i <= steps; ++i) {
            Eigen::VectorXd x(1);
            x(0) = -r0 + 2.0 * r0 * i / steps;
            inner_min = std::min(inner_min, gap_at(x));
        }
    } else if (objective.dim == 2) {
        const int steps = 180;
        for (int iy = 0; iy <= steps; ++iy) {
            for (int ix = 0; ix <= steps; ++ix) {
                Eigen::VectorXd x(2);
                x << -r0 + 2.0 * r0 * ix / steps, -r0 + 2.0 * r0 * iy / steps;
                inner_min = std::min(inner_min, gap_at(x));
            }
        }
    } else {
        for (int i = 0; i < 4096; ++i) {
            inner_min = std::min(inner_min, gap_at(sampler.in_annulus(0, r0)));
        }
    }

    const int per_radius = std::max(16, samples / static_cast<int>(radii.size()));
    std::vector<double> sphere_min(radii.size(), std::numeric_limits<double>::infinity());
    for (size_t j = 0; j < radii.size(); ++j) {
        for (int i = 0; i < per_radius; ++i) {
            sphere_min[j] = std::min(sphere_min[j], gap_at(radii[j] * sampler.direction()));
        }
    }

    const double global_min = std::min(inner_min, *std::min_element(sphere_min.begin(), sphere_min.end()));

    CheckResult result;
    result.name = "laplacian-gap";
    result.witnesses.push_back({"global-min", global_min});
    result.witnesses.push_back({"inner-min", inner_min});
    for (size_t j = 0; j < radii.size(); ++j) {
        result.witnesses.push_back({at_radius("min", radii[j]), sphere_min[j]});
    }
    if (std::isfinite(global_min) && sphere_min.back() >= sphere_min.front() &&
        sphere_min.back() >= global_min) {
        result.status = CheckStatus::Pass;
        result.note = "|grad U|^2 - laplacian U bounded below; no downward tail";
    } else {
        result.status = CheckStatus::Fail;
        result.note = "|grad U|^2 - laplacian U trends downward with radius";
    }
    return result;
}

double alignment_floor(int dim) {
    if (dim < 1) throw std::invalid_argument("alignment_floor: dim must be >= 1");
    return std::sqrt((4.0 * dim - 4.0) / (4.0 * dim - 3.0));
}

CheckResult check_radial_alignment(const ObjectiveSet& objective, const std::vector<double>& radii,
                                   int directions, std::uint64_t seed) {
    if (radii.size() < 2 || !std::is_sorted(radii.begin(), radii.end())) {
        throw std::invalid_argument("check_radial_alignment: need ascending radii");
    }
    Sampler sampler(seed, kOpAlignment, objective.dim);
    const double floor = alignment_floor(objective.dim);

    std::vector<double> a_min(radii.size(), std::numeric_limits<double>::infinity());
    for (size_t j = 0; j < radii.size(); ++j) {
        for (int i = 0; i < directions; ++i) {
            const Eigen::VectorXd u = sampler.direction();
            const Eigen::VectorXd g = objective.gradient(radii[j] * u);
            const double norm = g.norm();
            // A vanishing gradient on a far sphere cannot align with anything.
            a_min[j] = std::min(a_min[j], norm > 1e-12 ? g.dot(u) / norm : -1.0);
        }
    }

    CheckResult result;
    result.name = "radial-alignment";
    result.witnesses.push_back({"floor", floor});
    for (size_t j = 0; j < radii.size(); ++j) {
        result.witnesses.push_back({at_radius("min", radii[j]), a_min[j]});
    }
    const bool ok = a_min.back() >= floor - 0.01 && a_min[a_min.size() - 2] >= floor - 0.01;
    result.status = ok ? CheckStatus::Pass : CheckStatus::Fail;
    result.note = ok ? "gradient asymptotically radial at the sampled tails"
                     : "gradient fails the radial-alignment floor at large radius";
    return result;
}

std::pair<CheckResult, CheckResult> check_growth(const ObjectiveSet& objective,
                                                 const std::vector<double>& radii, int directions,
                                                 std::uint64_t seed) {
    if (radii.size() < 2 || !std::is_sorted(radii.begin(), radii.end())) {
        throw std::invalid_argument("check_growth: need ascending radii");
    }
    Sampler sampler(seed, kOpGrowth, objective.dim);

    std::vector<double> r_min(radii.size(), std::numeric_limits<double>::infinity());
    std::vector<double> r_max(radii.size(), 0.0);
    for (size_t j = 0; j < radii.size(); ++j) {
        for (int i = 0; i < directions; ++i) {
            const double ratio =
                objective.gradient(radii[j] * sampler.direction()).norm() / radii[j];
            r_min[j] = std::min(r_min[j], ratio);
            r_max[j] = std::max(r_max[j], ratio);
        }
    }

    CheckResult lower, upper;
    lower.name = "growth-lower";
    upper.name = "growth-upper";
    for (size_t j = 0; j < radii.size(); ++j) {
        lower.witnesses.push_back({at_radius("min", radii[j]), r_min[j]});
        upper.witnesses.push_back({at_radius("max", radii[j]), r_max[j]});
    }

    const double lo_last = r_min.back(), lo_prev = r_min[r_min.size() - 2];
    if (lo_last < 1e-6) {
        lower.status = CheckStatus::Fail;
        lower.note = "|grad U|/|x| collapses toward zero at large radius";
    } else if (lo_last >= 0.8 * lo_prev) {
        lower.status = CheckStatus::Pass;
        lower.note = "|grad U|/|x| bounded away from zero at the sampled tails";
    } else {
        lower.status = CheckStatus::Inconclusive;
        lower.note = "|grad U|/|x| lower profile still moving";
    }

    const double hi_last = r_max.back(), hi_prev = r_max[r_max.size() - 2];
    upper.witnesses.push_back({"tail-growth", hi_prev > 0 ? hi_last / hi_prev : 1.0});
    if (hi_last >= 1.5 * hi_prev) {
        upper.status = CheckStatus::Fail;
        upper.note = "|grad U|/|x| keeps growing: gradient is super-linear";
    } else if (hi_last <= 1.1 * hi_prev) {
        upper.status = CheckStatus::Pass;
        upper.note = "|grad U|/|x| stabilizes at the sampled tails";
    } else {
        upper.status = CheckStatus::Inconclusive;
        upper.note = "|grad U|/|x| upper profile still moving";
    }
    return {lower, upper};
}

CheckResult check_colinearity(const SensorField& field) {
    CheckResult result;
    result.name = "sensor-geometry";
    const int n = field.n_sensors();
    result.witnesses.push_back({"n-sensors", static_cast<double>(n)});

    double min_pairwise = std::numeric_limits<double>::infinity();
    for (int a = 0; a < n; ++a) {
        for (int b = a + 1; b < n; ++b) {
            min_pairwise = std::min(min_pairwise, (field.sensors.row(a) - field.sensors.row(b)).norm());
        }
    }
    result.witnesses.push_back({"min-pairwise-distance", n > 1 ? min_pairwise : 0.0});
    const bool distinct = n >= 3 && min_pairwise > 1e-12;

    // For each target the best sensor pair must span a real triangle with it.
    double worst_cross = std::numeric_limits<double>::infinity();
    for (int k = 0; k < field.n_targets(); ++k) {
        const Eigen::Vector2d z = field.targets.row(k).transpose();
        double best = 0.0;
        for (int a = 0; a < n; ++a) {
            const Eigen::Vector2d sa = field.sensors.row(a).transpose();
            for (int b = 0; b < n; ++b) {
                if (a == b) continue;
                const Eigen::Vector2d edge = field.sensors.row(b).transpose() - sa;
                const Eigen::Vector2d to_target = z - sa;
                const double cross = std::abs(edge.x() * to_target.y() - edge.y() * to_target.x());
                const double scale = edge.norm() * (1.0 + to_target.norm());
                if (scale > 0.0) best = std::max(best, cross / scale);
            }
        }
        worst_cross = std::min(worst_cross, best);
    }
    if (field.n_targets() > 0) {
        result.witnesses.push_back({"min-normalized-cross", worst_cross});
    }
    const bool spanning = field.n_targets() > 0 && worst_cross > 1e-9;

    if (distinct && spanning) {
        result.status = CheckStatus::Pass;
        result.note = "sensors pairwise distinct and non-colinear around every target";
    } else {
        result.status = CheckStatus::Fail;
        result.note = !distinct ? "fewer than 3 distinct sensors"
                                : "sensors and a target are colinear: minimum set degenerates";
    }
    return result;
}

CheckResult check_connectivity(const GraphModel& model) {
    model.validate();
    CheckResult result;
    result.name = "connectivity-mean";
    if (model.n_agents() == 1) {
        result.status = CheckStatus::Pass;
        result.witnesses.push_back({"n-agents", 1.0});
        result.note = "single agent: nothing to gossip";
        return result;
    }
    const double lambda2 = lambda2_of_mean(model);
    result.witnesses.push_back({"lambda2", lambda2});
    result.witnesses.push_back({"activation-p", model.activation_p});
    if (lambda2 > 1e-12) {
        result.status = CheckStatus::Pass;
        result.note = "mean Laplacian has a positive spectral gap";
    } else {
        result.status = CheckStatus::Fail;
        result.note = "mean graph is disconnected: information cannot mix";
    }
    return result;
}

CheckResult check_schedule(const WeightSchedule& schedule) {
    CheckResult result;
    result.name = "schedule";
    result.witnesses = {{"c-alpha", schedule.c_alpha},
                        {"c-beta", schedule.c_beta},
                        {"tau-beta", schedule.tau_beta},
                        {"c-gamma", schedule.c_gamma},
                        {"gamma2-over-alpha", schedule.c_gamma * schedule.c_gamma / schedule.c_alpha}};
    const auto violations = schedule.violations();
    if (violations.empty()) {
        result.status = CheckStatus::Pass;
        result.note = schedule.c0_bound
                          ? "weight sequences admissible; noise/step ratio clears the bound"
                          : "weight sequences admissible; no lower bound configured for "
                            "c_gamma^2/c_alpha, ratio reported unverified";
    } else {
        result.status = CheckStatus::Fail;
        std::ostringstream note;
        note << "inadmissible weights:";
        for (const auto& v : violations) note << " [" << v << "]";
        result.note = note.str();
    }
    return result;
}

const CheckResult* AssumptionReport::find(const std::string& name) const {
    for (const auto& e : entries) {
        if (e.name == name) return &e;
    }
    return nullptr;
}

bool AssumptionReport::hard_fail() const {
    static const char* hard[] = {"coercivity",    "laplacian-gap",     "radial-alignment",
                                 "growth-lower",  "growth-upper",      "connectivity-mean",
                                 "sensor-geometry", "minimum-certificate"};
    for (const auto& e : entries) {
        if (e.status != CheckStatus::Fail) continue;
        for (const char* name : hard) {
            if (e.name == name) return true;
        }
    }
    return false;
}

AssumptionReport run_all_checks(const ObjectiveSet& objective, const SensorField* field,
                                const GraphModel* graph, const WeightSchedule* schedule,
                                const SuiteParams& params) {
    auto lipschitz = std::async(std::launch::async, [&] {
        return check_lipschitz(objective, params.region_radius, params.samples, params.seed);
    });
    auto dissimilarity = std::async(std::launch::async, [&] {
        return check_dissimilarity(objective, params.radii, params.samples, params.seed);
    });
    auto coercivity = std::async(std::launch::async, [&] {
        return check_coercivity(objective, params.radii, params.directions, params.seed);
    });
    auto laplacian = std::async(std::launch::async, [&] {
        return check_laplacian_gap(objective, params.radii, params.samples, params.seed);
    });
    auto alignment = std::async(std::launch::async, [&] {
        return check_radial_alignment(objective, params.radii, params.directions, params.seed);
    });
    auto growth = std::async(std::launch::async, [&] {
        return check_growth(objective, params.radii, params.directions, params.seed);
    });

    AssumptionReport report;
    report.entries.push_back(lipschitz.get());
    report.entries.push_back(dissimilarity.get());
    report.entries.push_back(coercivity.get());
    report.entries.push_back(laplacian.get());
    report.entries.push_back(alignment.get());
    auto [lower, upper] = growth.get();
    report.entries.push_back(std::move(lower));
    report.entries.push_back(std::move(upper));
    if (graph) report.entries.push_back(check_connectivity(*graph));
    if (field) report.entries.push_back(check_colinearity(*field));
    if (schedule) report.entries.push_back(check_schedule(*schedule));

    // Minimum certificate: the Gibbs limit concentrates on the minimum set
    // only if the minima are isolated, nondegenerate zeros.
    CheckResult certificate;
    certificate.name = "minimum-certificate";
    if (objective.minimizers.empty()) {
        certificate.status = CheckStatus::Inconclusive;
        certificate.note = "no known minimizers to certify";
    } else {
        const MinimumCertificate cert =
            certify_minimum_set(objective, objective.minimizers, params.seed);
        double min_sv = std::numeric_limits<double>::infinity();
        for (const auto& c : cert.candidates) min_sv = std::min(min_sv, c.hessian_min_sv);
        certificate.witnesses = {{"min-value", cert.min_value},
                                 {"sphere-min", cert.sphere_min},
                                 {"seam-gap", cert.seam_gap},
                                 {"min-hessian-sv", min_sv},
                                 {"sublevel-hits", static_cast<double>(cert.sublevel_hits)}};
        certificate.status = cert.pass() ? CheckStatus::Pass : CheckStatus::Fail;
        certificate.note = cert.pass()
                               ? "isolated nondegenerate zeros: concentration target is sound"
                               : "minimum set fails isolation/nondegeneracy";
    }
    report.entries.push_back(std::move(certificate));
    return report;
}

}  // namespace danneal
