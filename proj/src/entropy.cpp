#include "igac/entropy.hpp"

#include "igac/errors.hpp"
#include "igac/quadrature.hpp"

#include <algorithm>
#include <cmath>

namespace igac {

namespace {

void include_point(Box& box, const Vector& theta) {
    box.lower = box.lower.cwiseMin(theta);
    box.upper = box.upper.cwiseMax(theta);
}

Box widened(const Box& raw, const Vector& origin, double floor, const std::vector<Interval>* domain) {
    Box box = raw;
    for (int i = 0; i < box.lower.size(); ++i) {
        const double min_width = floor * (1.0 + std::abs(origin[i]));
        const double width = box.upper[i] - box.lower[i];
        if (width >= min_width) continue;
        const double grow = 0.5 * (min_width - width);
        double lo = box.lower[i] - grow;
        double hi = box.upper[i] + grow;
        if (domain) {
            const Interval& d = (*domain)[static_cast<std::size_t>(i)];
            if (!(lo > d.lower)) {
                lo = box.lower[i];
                hi = lo + min_width;
            } else if (!(hi < d.upper)) {
                hi = box.upper[i];
                lo = hi - min_width;
            }
        }
        box.lower[i] = lo;
        box.upper[i] = hi;
    }
    return box;
}

// Outer integration nodes on [0, tau]: path samples, the end point, and
// uniform Hermite refinement when there are fewer than `min_points`.
std::vector<PathSample> outer_nodes(std::span<const PathSample> path, double tau, std::size_t min_points) {
    std::vector<PathSample> base;
    for (const auto& s : path) {
        if (s.tau < tau) base.push_back(s);
    }
    base.push_back(interpolate(path, tau));
    if (base.size() >= min_points || base.size() < 2) {
        return base;
    }
    const std::size_t intervals = base.size() - 1;
    const std::size_t split = (min_points - 1 + intervals - 1) / intervals;
    std::vector<PathSample> refined;
    refined.reserve(intervals * split + 1);
    for (std::size_t i = 0; i < intervals; ++i) {
        refined.push_back(base[i]);
        for (std::size_t k = 1; k < split; ++k) {
            const double t = base[i].tau + (base[i + 1].tau - base[i].tau) * static_cast<double>(k) /
                                               static_cast<double>(split);
            refined.push_back(interpolate(path, t));
        }
    }
    refined.push_back(base.back());
    return refined;
}

void check_path(std::span<const PathSample> path) {
    if (path.size() < 2) {
        throw ArgumentError("entropy needs a path with at least two samples");
    }
}

}  // namespace

std::string_view to_string(VolumeMeasure measure) noexcept {
    return measure == VolumeMeasure::riemannian ? "riemannian" : "coordinate";
}

std::string_view to_string(GrowthLaw law) noexcept {
    switch (law) {
        case GrowthLaw::linear: return "linear";
        case GrowthLaw::logarithmic: return "logarithmic";
        case GrowthLaw::inconclusive: return "inconclusive";
    }
    return "inconclusive";
}

Box swept_region(std::span<const PathSample> path, double tau_prime, double floor,
                 const std::vector<Interval>* domain) {
    check_path(path);
    if (tau_prime < path.front().tau || tau_prime > path.back().tau) {
        throw ArgumentError("swept_region: tau' outside the trajectory range");
    }
    if (!(floor > 0.0)) {
        throw ArgumentError("swept_region: floor must be positive");
    }
    Box box{path.front().theta, path.front().theta};
    for (const auto& s : path) {
        if (s.tau > tau_prime) break;
        include_point(box, s.theta);
    }
    if (tau_prime > path.front().tau) {
        include_point(box, interpolate(path, tau_prime).theta);
    }
    return widened(box, path.front().theta, floor, domain);
}

double region_volume(const MetricField& metric, const Box& box, const EntropyOptions& options) {
    const int n = metric.dim();
    if (options.measure == VolumeMeasure::coordinate) {
        double v = 1.0;
        for (int i = 0; i < n; ++i) v *= box.upper[i] - box.lower[i];
        return v;
    }
    if (const auto& factors = metric.separable_density()) {
        double v = 1.0;
        for (int i = 0; i < n; ++i) {
            v *= quad::integrate_graded((*factors)[static_cast<std::size_t>(i)], box.lower[i], box.upper[i],
                                        options.quadrature_nodes, options.max_panel_ratio);
        }
        return v;
    }
    std::vector<double> lo(box.lower.data(), box.lower.data() + n);
    std::vector<double> hi(box.upper.data(), box.upper.data() + n);
    return quad::integrate_box(
        [&metric, n](std::span<const double> x) {
            Vector p(n);
            for (int i = 0; i < n; ++i) p[i] = x[static_cast<std::size_t>(i)];
            return metric.volume_density(p);
        },
        lo, hi, options.quadrature_nodes, options.max_panel_ratio);
}

double statistical_volume(const MetricField& metric, std::span<const PathSample> path, double tau,
                          const EntropyOptions& options) {
    check_path(path);
    if (!(tau > path.front().tau) || tau > path.back().tau) {
        throw ArgumentError("statistical_volume: tau outside the trajectory range");
    }
    const auto nodes = outer_nodes(path, tau, options.min_outer_points);
    Box running{nodes.front().theta, nodes.front().theta};
    double integral = 0.0;
    double previous = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        include_point(running, nodes[i].theta);
        const double vol =
            region_volume(metric, widened(running, path.front().theta, options.floor, &metric.domain()), options);
        if (!std::isfinite(vol)) {
            throw OracleFailure("swept volume is not finite", previous, vol);
        }
        if (i > 0) integral += 0.5 * (vol + previous) * (nodes[i].tau - nodes[i - 1].tau);
        previous = vol;
    }
    return integral / (tau - path.front().tau);
}

std::vector<double> entropy_grid(std::span<const PathSample> path, double tau_min) {
    std::vector<double> grid;
    for (const auto& s : path) {
        if (s.tau >= tau_min) grid.push_back(s.tau);
    }
    return grid;
}

IGESeries ige_series(const MetricField& metric, std::span<const PathSample> path, std::span<const double> tau_grid,
                     const EntropyOptions& options) {
    check_path(path);
    if (tau_grid.empty()) {
        throw ArgumentError("ige_series: empty tau grid");
    }
    for (std::size_t i = 0; i < tau_grid.size(); ++i) {
        if (tau_grid[i] < options.tau_min || tau_grid[i] <= path.front().tau || tau_grid[i] > path.back().tau) {
            throw ArgumentError("ige_series: grid point outside [tau_min, tau_end]");
        }
        if (i > 0 && !(tau_grid[i] > tau_grid[i - 1])) {
            throw ArgumentError("ige_series: tau grid must be strictly increasing");
        }
    }
    const auto nodes = outer_nodes(path, tau_grid.back(), options.min_outer_points);
    const Vector& origin = path.front().theta;
    const double t0 = path.front().tau;

    // Cumulative trapezoid over the node grid.
    std::vector<Box> boxes;
    std::vector<double> vol(nodes.size());
    std::vector<double> cumulative(nodes.size(), 0.0);
    Box running{nodes.front().theta, nodes.front().theta};
    boxes.reserve(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        include_point(running, nodes[i].theta);
        boxes.push_back(running);
        vol[i] = region_volume(metric, widened(running, origin, options.floor, &metric.domain()), options);
        if (!std::isfinite(vol[i]) || !(vol[i] > 0.0)) {
            throw OracleFailure("swept volume is not finite and positive", i ? vol[i - 1] : 0.0, vol[i]);
        }
        if (i > 0) cumulative[i] = cumulative[i - 1] + 0.5 * (vol[i] + vol[i - 1]) * (nodes[i].tau - nodes[i - 1].tau);
    }

    IGESeries out;
    out.samples.reserve(tau_grid.size());
    std::size_t j = 0;
    for (double tau : tau_grid) {
        while (j + 1 < nodes.size() && nodes[j + 1].tau <= tau) ++j;
        double integral = cumulative[j];
        if (nodes[j].tau < tau) {
            const PathSample s = interpolate(path, tau);
            Box b = boxes[j];
            include_point(b, s.theta);
            const double v = region_volume(metric, widened(b, origin, options.floor, &metric.domain()), options);
            integral += 0.5 * (v + vol[j]) * (tau - nodes[j].tau);
        }
        const double volume = integral / (tau - t0);
        out.samples.push_back({tau, volume, std::log(volume)});
    }
    std::vector<double> t, s;
    for (const auto& x : out.samples) {
        t.push_back(x.tau);
        s.push_back(x.entropy);
    }
    out.growth = classify_growth(t, s, options.window, options.separation);
    return out;
}

GrowthClassification classify_growth(std::span<const double> tau, std::span<const double> entropy, double window,
                                     double separation) {
    if (tau.size() != entropy.size()) {
        throw ArgumentError("classify_growth: tau and entropy differ in length");
    }
    if (!(window > 0.0 && window <= 1.0)) {
        throw ArgumentError("classify_growth: window must lie in (0, 1]");
    }
    const std::size_t n = tau.size();
    const auto count = std::min(n, static_cast<std::size_t>(std::ceil(window * static_cast<double>(n))));
    if (count < 10) {
        throw ArgumentError("classify_growth needs at least 10 samples in the tail window");
    }
    const std::size_t start = n - count;
    auto fit = [&](auto transform, double& slope, double& intercept) {
        double mx = 0.0, my = 0.0;
        for (std::size_t i = start; i < n; ++i) {
            mx += transform(tau[i]);
            my += entropy[i];
        }
        mx /= static_cast<double>(count);
        my /= static_cast<double>(count);
        double sxx = 0.0, sxy = 0.0;
        for (std::size_t i = start; i < n; ++i) {
            const double dx = transform(tau[i]) - mx;
            sxx += dx * dx;
            sxy += dx * (entropy[i] - my);
        }
        slope = sxx > 0.0 ? sxy / sxx : 0.0;
        intercept = my - slope * mx;
        double ss = 0.0;
        for (std::size_t i = start; i < n; ++i) {
            const double r = entropy[i] - (intercept + slope * transform(tau[i]));
            ss += r * r;
        }
        return std::sqrt(ss / static_cast<double>(count));
    };
    for (std::size_t i = start; i < n; ++i) {
        if (!(tau[i] > 1.0)) {
            throw ArgumentError("classify_growth needs tau > 1 on the tail window");
        }
    }
    GrowthClassification out;
    double b_lin = 0.0, b_log = 0.0;
    out.residual_linear = fit([](double t) { return t; }, out.slope_linear, b_lin);
    out.residual_log = fit([](double t) { return std::log(t); }, out.slope_log, b_log);
    const bool linear_better = out.residual_linear <= out.residual_log;
    out.coefficient = linear_better ? out.slope_linear : out.slope_log;
    out.intercept = linear_better ? b_lin : b_log;
    const double best = std::min(out.residual_linear, out.residual_log);
    const double worst = std::max(out.residual_linear, out.residual_log);
    if (worst > best && worst >= separation * best) {
        out.law = linear_better ? GrowthLaw::linear : GrowthLaw::logarithmic;
    }
    return out;
}

}  // namespace igac
