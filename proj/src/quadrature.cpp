#include "igac/quadrature.hpp"

#include "igac/errors.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

namespace igac::quad {

namespace {

Rule compute_rule(int n) {
    Rule rule;
    rule.nodes.resize(static_cast<std::size_t>(n));
    rule.weights.resize(static_cast<std::size_t>(n));
    // Newton iteration on P_n from the Chebyshev-like initial guess.
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0;
            double p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = pk;
            }
            if (n == 1) {
                p0 = 1.0;
                p1 = x;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) {
                break;
            }
        }
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[static_cast<std::size_t>(i)] = -x;
        rule.nodes[static_cast<std::size_t>(n - 1 - i)] = x;
        rule.weights[static_cast<std::size_t>(i)] = w;
        rule.weights[static_cast<std::size_t>(n - 1 - i)] = w;
    }
    if (n % 2 == 1) {
        rule.nodes[static_cast<std::size_t>(n / 2)] = 0.0;
    }
    return rule;
}

}  // namespace

const Rule& gauss_legendre(int n) {
    if (n < 1) {
        throw ArgumentError("Gauss-Legendre rule needs at least one node");
    }
    static std::mutex mutex;
    static std::map<int, Rule> cache;
    std::lock_guard lock(mutex);
    auto it = cache.find(n);
    if (it == cache.end()) {
        it = cache.emplace(n, compute_rule(n)).first;
    }
    return it->second;
}

MappedNodes composite(double a, double b, int panels, const Rule& rule) {
    MappedNodes out;
    out.x.reserve(rule.nodes.size() * static_cast<std::size_t>(panels));
    out.w.reserve(out.x.capacity());
    const double width = (b - a) / panels;
    for (int p = 0; p < panels; ++p) {
        const double lo = a + p * width;
        const double half = 0.5 * width;
        const double mid = lo + half;
        for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
            out.x.push_back(mid + half * rule.nodes[i]);
            out.w.push_back(half * rule.weights[i]);
        }
    }
    return out;
}

std::vector<double> graded_breakpoints(double a, double b, double max_ratio) {
    if (!(b > a)) {
        return {a, b};
    }
    if (a < 0.0 && b > 0.0) {
        auto left = graded_breakpoints(a, 0.0, max_ratio);
        auto right = graded_breakpoints(0.0, b, max_ratio);
        left.insert(left.end(), right.begin() + 1, right.end());
        return left;
    }
    // Same sign (or touching zero). Work with magnitudes near <= far.
    const bool negative = b <= 0.0;
    const double near = negative ? -b : a;
    const double far = negative ? -a : b;
    std::vector<double> mags{far};
    // Graded panels stop at far * 1e-6 when the interval touches zero;
    // the remaining sliver is a single panel.
    const double stop = near > 0.0 ? near : far * 1e-6;
    double x = far;
    while (x / max_ratio > stop) {
        x /= max_ratio;
        mags.push_back(x);
    }
    mags.push_back(near);
    std::vector<double> points;
    points.reserve(mags.size());
    if (negative) {
        for (double m : mags) {
            points.push_back(-m);
        }
    } else {
        points.assign(mags.rbegin(), mags.rend());
    }
    points.erase(std::unique(points.begin(), points.end()), points.end());
    return points;
}

MappedNodes graded(double a, double b, const Rule& rule, double max_ratio) {
    MappedNodes out;
    const auto points = graded_breakpoints(a, b, max_ratio);
    for (std::size_t p = 0; p + 1 < points.size(); ++p) {
        auto panel = composite(points[p], points[p + 1], 1, rule);
        out.x.insert(out.x.end(), panel.x.begin(), panel.x.end());
        out.w.insert(out.w.end(), panel.w.begin(), panel.w.end());
    }
    return out;
}

double integrate_graded(const std::function<double(double)>& f, double a, double b,
                        int nodes_per_panel, double max_ratio) {
    const auto nodes = graded(a, b, gauss_legendre(nodes_per_panel), max_ratio);
    double sum = 0.0;
    for (std::size_t i = 0; i < nodes.x.size(); ++i) {
        sum += nodes.w[i] * f(nodes.x[i]);
    }
    return sum;
}

double integrate_box(const std::function<double(std::span<const double>)>& f,
                     std::span<const double> lower, std::span<const double> upper,
                     int nodes_per_panel, double max_ratio) {
    const std::size_t dim = lower.size();
    if (upper.size() != dim || dim == 0) {
        throw ArgumentError("box bounds must be non-empty and of equal dimension");
    }
    const Rule& rule = gauss_legendre(nodes_per_panel);
    std::vector<MappedNodes> axes;
    axes.reserve(dim);
    for (std::size_t d = 0; d < dim; ++d) {
        axes.push_back(graded(lower[d], upper[d], rule, max_ratio));
    }
    std::vector<std::size_t> idx(dim, 0);
    std::vector<double> x(dim);
    double sum = 0.0;
    while (true) {
        double w = 1.0;
        for (std::size_t d = 0; d < dim; ++d) {
            x[d] = axes[d].x[idx[d]];
            w *= axes[d].w[idx[d]];
        }
        sum += w * f(x);
        std::size_t d = 0;
        while (d < dim && ++idx[d] == axes[d].x.size()) {
            idx[d] = 0;
            ++d;
        }
        if (d == dim) {
            break;
        }
    }
    return sum;
}

}  // namespace igac::quad
