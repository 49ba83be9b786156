#include "danneal/gibbs.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <thread>

#include "danneal/numdiff.hpp"
#include "danneal/rng.hpp"

namespace danneal {

std::int64_t GibbsGrid::n_cells() const {
    std::int64_t n = 1;
    for (int a = 0; a < dim; ++a) n *= resolution;
    return n;
}

double GibbsGrid::cell_volume() const {
    double v = 1.0;
    for (int a = 0; a < dim; ++a) v *= (hi(a) - lo(a)) / resolution;
    return v;
}

Eigen::VectorXd GibbsGrid::cell_center(std::int64_t flat) const {
    Eigen::VectorXd x(dim);
    for (int a = 0; a < dim; ++a) {
        const std::int64_t i = flat % resolution;
        flat /= resolution;
        x(a) = lo(a) + (i + 0.5) * (hi(a) - lo(a)) / resolution;
    }
    return x;
}

GridError::GridError(Kind kind_, const std::string& message)
    : std::runtime_error(message), kind(kind_) {}

namespace {

// Runs fn(begin, end) over [0, n) split into contiguous chunks, one per
// worker. Chunks only partition the work; each index is written once, so the
// result never depends on the thread count.
template <class Fn>
void parallel_chunks(std::int64_t n, int threads, Fn&& fn) {
    const int workers = static_cast<int>(std::max<std::int64_t>(1, std::min<std::int64_t>(threads, n)));
    if (workers == 1) {
        fn(std::int64_t{0}, n);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
        const std::int64_t begin = n * w / workers;
        const std::int64_t end = n * (w + 1) / workers;
        pool.emplace_back([begin, end, &fn] { fn(begin, end); });
    }
    for (auto& t : pool) t.join();
}

}  // namespace

GibbsGrid build_grid(const ObjectiveSet& objective, const Eigen::VectorXd& lo,
                     const Eigen::VectorXd& hi, int resolution, double epsilon, int threads) {
    if (objective.dim > 2) {
        throw GridError(GridError::Kind::BadDomain, "grid oracle limited to d <= 2");
    }
    if (objective.dim < 1 || lo.size() != objective.dim || hi.size() != objective.dim) {
        throw GridError(GridError::Kind::BadDomain, "bounds do not match the objective dimension");
    }
    for (int a = 0; a < objective.dim; ++a) {
        if (!(lo(a) < hi(a))) {
            throw GridError(GridError::Kind::BadDomain, "box must have lo < hi on every axis");
        }
    }
    if (resolution < 64) {
        throw GridError(GridError::Kind::BadDomain, "resolution must be at least 64");
    }
    if (!(epsilon > 0.0)) {
        throw GridError(GridError::Kind::BadDomain, "epsilon must be positive");
    }

    GibbsGrid grid;
    grid.dim = objective.dim;
    grid.lo = lo;
    grid.hi = hi;
    grid.resolution = resolution;
    grid.epsilon = epsilon;

    const std::int64_t cells = grid.n_cells();
    Eigen::ArrayXd logw(cells);
    const double scale = -2.0 / (epsilon * epsilon);
    parallel_chunks(cells, threads, [&](std::int64_t begin, std::int64_t end) {
        for (std::int64_t i = begin; i < end; ++i) {
            logw(i) = scale * objective.value(grid.cell_center(i));
        }
    });

    // Serial log-sum-exp in index order: normalization independent of threads.
    const double peak = logw.maxCoeff();
    double acc = 0.0;
    for (std::int64_t i = 0; i < cells; ++i) acc += std::exp(logw(i) - peak);
    const double lse = peak + std::log(acc);
    grid.log_z = lse + std::log(grid.cell_volume());
    grid.density = (logw - lse).exp() / grid.cell_volume();

    // The box must confine the measure, or the quadrature silently loses mass.
    const double density_peak = grid.density.maxCoeff();
    const int res = resolution;
    double boundary_peak = 0.0;
    for (std::int64_t i = 0; i < cells; ++i) {
        bool on_boundary = false;
        std::int64_t rest = i;
        for (int a = 0; a < grid.dim; ++a) {
            const std::int64_t axis = rest % res;
            rest /= res;
            on_boundary = on_boundary || axis == 0 || axis == res - 1;
        }
        if (on_boundary) boundary_peak = std::max(boundary_peak, grid.density(i));
    }
    if (boundary_peak > 1e-12 * density_peak) {
        std::ostringstream msg;
        msg << "measure leaks through the box boundary (boundary density " << boundary_peak
            << " vs peak " << density_peak << "); enlarge the bounds";
        throw GridError(GridError::Kind::BoundaryLeak, msg.str());
    }

    // A resolved peak has comparable axis neighbors; a 10x jump means the
    // concentration spike fell between grid points.
    std::int64_t peak_cell = 0;
    grid.density.maxCoeff(&peak_cell);
    double neighbor_peak = 0.0;
    std::int64_t stride = 1;
    for (int a = 0; a < grid.dim; ++a) {
        const std::int64_t axis = (peak_cell / stride) % res;
        if (axis > 0) neighbor_peak = std::max(neighbor_peak, grid.density(peak_cell - stride));
        if (axis < res - 1) {
            neighbor_peak = std::max(neighbor_peak, grid.density(peak_cell + stride));
        }
        stride *= res;
    }
    if (density_peak > 10.0 * neighbor_peak) {
        std::ostringstream msg;
        msg << "resolution too coarse: peak cell density " << density_peak
            << " exceeds 10x its neighbors (" << neighbor_peak << ")";
        throw GridError(GridError::Kind::TooCoarse, msg.str());
    }
    return grid;
}

double mass_near(const GibbsGrid& grid, const std::vector<Eigen::VectorXd>& centers,
                 double radius) {
    if (centers.empty()) throw std::invalid_argument("mass_near: need at least one center");
    if (!(radius > 0.0)) throw std::invalid_argument("mass_near: radius must be positive");
    for (const auto& c : centers) {
        if (c.size() != grid.dim) throw std::invalid_argument("mass_near: center has wrong size");
        for (int a = 0; a < grid.dim; ++a) {
            if (c(a) < grid.lo(a) || c(a) > grid.hi(a)) {
                throw std::invalid_argument("mass_near: center outside the grid bounds");
            }
        }
    }
    double acc = 0.0;
    const std::int64_t cells = grid.n_cells();
    for (std::int64_t i = 0; i < cells; ++i) {
        const Eigen::VectorXd x = grid.cell_center(i);
        for (const auto& c : centers) {
            if ((x - c).norm() <= radius) {
                acc += grid.density(i);
                break;
            }
        }
    }
    return acc * grid.cell_volume();
}

bool MinimumCertificate::pass() const {
    if (!(sublevel_positive && min_is_zero && sublevel_compact && smooth)) return false;
    for (const auto& c : candidates) {
        if (!c.hessian_ok) return false;
    }
    return !candidates.empty();
}

MinimumCertificate certify_minimum_set(const ObjectiveSet& objective,
                                       const std::vector<Eigen::VectorXd>& candidate_minima,
                                       std::uint64_t seed) {
    if (candidate_minima.empty()) {
        throw std::invalid_argument("certify_minimum_set: need candidate minima");
    }
    const int dim = objective.dim;
    MinimumCertificate report;
    std::mt19937_64 rng = substream(seed, 0, kStreamChecker);
    std::normal_distribution<double> gauss;
    auto random_direction = [&] {
        Eigen::VectorXd u(dim);
        for (int i = 0; i < dim; ++i) u(i) = gauss(rng);
        u.normalize();
        return u;
    };

    // (ii) the candidates really sit at value 0.
    report.min_value = std::numeric_limits<double>::infinity();
    double max_candidate_norm = 0.0;
    for (const auto& c : candidate_minima) {
        if (c.size() != dim) {
            throw std::invalid_argument("certify_minimum_set: candidate has wrong size");
        }
        report.min_value = std::min(report.min_value, objective.value(c));
        max_candidate_norm = std::max(max_candidate_norm, c.norm());
    }
    report.min_is_zero = std::abs(report.min_value) <= 1e-8;

    // (i) strictly-sublevel points exist arbitrarily near the candidates, so
    // the set {U < a} has positive volume for small a > 0.
    report.sublevel_level = 1e-3;
    for (const auto& c : candidate_minima) {
        for (int j = 0; j < 64; ++j) {
            const Eigen::VectorXd x = c + 0.01 * random_direction();
            if (objective.value(x) < report.sublevel_level) ++report.sublevel_hits;
        }
    }
    report.sublevel_positive = report.sublevel_hits > 0;

    // (iii) U is large on a sphere well outside the candidates, so the small
    // sublevel sets cannot reach infinity.
    report.sphere_radius = 8.0 * (1.0 + max_candidate_norm);
    report.sphere_min = std::numeric_limits<double>::infinity();
    for (int j = 0; j < 128; ++j) {
        const Eigen::VectorXd x = report.sphere_radius * random_direction();
        report.sphere_min = std::min(report.sphere_min, objective.value(x));
    }
    report.sublevel_compact = report.sphere_min > report.min_value + 1.0;

    // (iv) seam smoothness plus a nondegenerate Hessian at every candidate.
    report.seam_gap = objective.seam_scan ? objective.seam_scan() : 0.0;
    report.smooth = report.seam_gap <= 1e-4;
    for (const auto& c : candidate_minima) {
        MinimumCertificate::Candidate entry;
        entry.x = c;
        entry.value = objective.value(c);
        const auto grad = [&objective](const Eigen::VectorXd& x) { return objective.gradient(x); };
        const Eigen::MatrixXd hess = hessian_from_gradient(grad, c, fd_step(c));
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(hess);
        entry.hessian_min_sv = svd.singularValues().minCoeff();
        entry.hessian_ok = entry.hessian_min_sv > 1e-6;
        report.candidates.push_back(std::move(entry));
    }
    return report;
}

}  // namespace danneal
