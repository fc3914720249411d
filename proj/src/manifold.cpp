#include "igac/manifold.hpp"

#include "igac/errors.hpp"
#include "igac/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace igac {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

std::string describe(const std::vector<std::string>& names, const Vector& theta) {
    std::ostringstream out;
    for (int i = 0; i < theta.size(); ++i) {
        out << (i ? ", " : "") << names[static_cast<std::size_t>(i)] << "=" << theta[i];
    }
    return out.str();
}

// g = k / mu^2 on (0, inf).
MetricField inverse_square_metric(double k, const std::string& name) {
    auto value = [k](const Vector& p) {
        Matrix g(1, 1);
        g(0, 0) = k / (p[0] * p[0]);
        return g;
    };
    auto derivative = [k](const Vector& p) {
        Tensor3 d(1);
        d(0, 0, 0) = -2.0 * k / (p[0] * p[0] * p[0]);
        return d;
    };
    auto second = [k](const Vector& p) {
        Tensor4 dd(1);
        const double m2 = p[0] * p[0];
        dd(0, 0, 0, 0) = 6.0 * k / (m2 * m2);
        return dd;
    };
    const double root_k = std::sqrt(k);
    std::vector<MetricField::DensityFactor> density{[root_k](double mu) { return root_k / mu; }};
    return MetricField({{0.0, inf}}, {name}, value, derivative, second, MetricProvider::analytic,
                       std::move(density));
}

MetricField gaussian_metric() {
    auto value = [](const Vector& p) {
        const double s2 = p[1] * p[1];
        Matrix g = Matrix::Zero(2, 2);
        g(0, 0) = 1.0 / s2;
        g(1, 1) = 2.0 / s2;
        return g;
    };
    auto derivative = [](const Vector& p) {
        const double s3 = p[1] * p[1] * p[1];
        Tensor3 d(2);
        d(1, 0, 0) = -2.0 / s3;
        d(1, 1, 1) = -4.0 / s3;
        return d;
    };
    auto second = [](const Vector& p) {
        const double s2 = p[1] * p[1];
        const double s4 = s2 * s2;
        Tensor4 dd(2);
        dd(1, 1, 0, 0) = 6.0 / s4;
        dd(1, 1, 1, 1) = 12.0 / s4;
        return dd;
    };
    std::vector<MetricField::DensityFactor> density{
        [](double) { return 1.0; },
        [](double sigma) { return std::numbers::sqrt2 / (sigma * sigma); },
    };
    return MetricField({{-inf, inf}, {0.0, inf}}, {"mu", "sigma"}, value, derivative, second,
                       MetricProvider::analytic, std::move(density));
}

Vector shifted(const Vector& p, int axis, double h) {
    Vector q = p;
    q[axis] += h;
    return q;
}

Vector shifted2(const Vector& p, int a, double ha, int b, double hb) {
    Vector q = p;
    q[a] += ha;
    q[b] += hb;
    return q;
}

}  // namespace

std::string_view to_string(FamilyKind kind) noexcept {
    switch (kind) {
        case FamilyKind::gaussian: return "gaussian";
        case FamilyKind::exponential: return "exponential";
        case FamilyKind::poisson_spacing: return "poisson_spacing";
        case FamilyKind::wigner_dyson: return "wigner_dyson";
    }
    return "unknown";
}

double ParametricFamily::log_density(double x, const Vector& theta) const {
    switch (kind) {
        case FamilyKind::gaussian: {
            const double mu = theta[0];
            const double sigma = theta[1];
            const double z = (x - mu) / sigma;
            return -0.5 * std::log(2.0 * std::numbers::pi * sigma * sigma) - 0.5 * z * z;
        }
        case FamilyKind::exponential:
        case FamilyKind::poisson_spacing: {
            const double mu = theta[0];
            return -std::log(mu) - x / mu;
        }
        case FamilyKind::wigner_dyson: {
            const double mu = theta[0];
            return std::log(std::numbers::pi * x / (2.0 * mu * mu)) -
                   std::numbers::pi * x * x / (4.0 * mu * mu);
        }
    }
    return std::numeric_limits<double>::quiet_NaN();
}

bool ParametricFamily::in_domain(const Vector& theta) const {
    if (theta.size() != param_dim) {
        return false;
    }
    for (int i = 0; i < param_dim; ++i) {
        if (!param_domain[static_cast<std::size_t>(i)].contains(theta[i])) {
            return false;
        }
    }
    return true;
}

ParametricFamily make_family(std::string_view name, const ParamRecord& params) {
    ParametricFamily family;
    family.name = std::string(name);
    if (name == "gaussian") {
        family.kind = FamilyKind::gaussian;
        family.param_dim = 2;
        family.sample_domain = {-inf, inf};
        family.param_domain = {{-inf, inf}, {0.0, inf}};
        family.param_names = {"mu", "sigma"};
        family.point = Vector(2);
        family.point << 0.0, 1.0;
    } else if (name == "exponential" || name == "poisson_spacing" || name == "wigner_dyson") {
        family.kind = name == "exponential"       ? FamilyKind::exponential
                      : name == "poisson_spacing" ? FamilyKind::poisson_spacing
                                                  : FamilyKind::wigner_dyson;
        family.param_dim = 1;
        family.sample_domain = {0.0, inf};
        family.param_domain = {{0.0, inf}};
        family.param_names = {"mu"};
        family.point = Vector::Constant(1, 1.0);
    } else {
        throw UnsupportedFamilyError(std::string(name));
    }
    for (const auto& [key, value] : params) {
        bool found = false;
        for (int i = 0; i < family.param_dim; ++i) {
            if (family.param_names[static_cast<std::size_t>(i)] == key) {
                family.point[i] = value;
                found = true;
            }
        }
        if (!found) {
            throw ArgumentError("family '" + family.name + "' has no parameter '" + key + "'");
        }
    }
    for (int i = 0; i < family.param_dim; ++i) {
        const auto& dom = family.param_domain[static_cast<std::size_t>(i)];
        if (!std::isfinite(family.point[i]) || !dom.contains(family.point[i])) {
            throw DomainError("parameter " + family.param_names[static_cast<std::size_t>(i)] +
                              " of family '" + family.name + "' outside its domain: " +
                              describe(family.param_names, family.point));
        }
    }
    return family;
}

MetricField::MetricField(std::vector<Interval> domain, std::vector<std::string> coordinate_names,
                         ValueFn value, DerivativeFn derivative, SecondDerivativeFn second_derivative,
                         MetricProvider provider,
                         std::optional<std::vector<DensityFactor>> separable_density)
    : domain_(std::move(domain)),
      names_(std::move(coordinate_names)),
      value_(std::move(value)),
      derivative_(std::move(derivative)),
      second_(std::move(second_derivative)),
      provider_(provider),
      separable_(std::move(separable_density)) {
    if (domain_.empty()) {
        throw ArgumentError("metric field needs at least one coordinate");
    }
    if (names_.size() != domain_.size()) {
        throw ArgumentError("coordinate name count does not match metric dimension");
    }
    if (separable_ && separable_->size() != domain_.size()) {
        throw ArgumentError("separable density must have one factor per coordinate");
    }
}

bool MetricField::contains(const Vector& p) const {
    if (p.size() != dim()) {
        return false;
    }
    for (int i = 0; i < dim(); ++i) {
        if (!std::isfinite(p[i]) || !domain_[static_cast<std::size_t>(i)].contains(p[i])) {
            return false;
        }
    }
    return true;
}

double MetricField::inner(const Vector& p, const Vector& u, const Vector& v) const {
    return u.dot(value(p) * v);
}

double MetricField::norm(const Vector& p, const Vector& v) const {
    return std::sqrt(std::max(0.0, inner(p, v, v)));
}

double MetricField::volume_density(const Vector& p) const {
    if (separable_) {
        double out = 1.0;
        for (int i = 0; i < dim(); ++i) {
            out *= (*separable_)[static_cast<std::size_t>(i)](p[i]);
        }
        return out;
    }
    return std::sqrt(std::abs(value(p).determinant()));
}

MetricField fisher_metric_analytic(const ParametricFamily& family) {
    switch (family.kind) {
        case FamilyKind::gaussian: return gaussian_metric();
        case FamilyKind::exponential:
        case FamilyKind::poisson_spacing: return inverse_square_metric(1.0, "mu");
        case FamilyKind::wigner_dyson: return inverse_square_metric(4.0, "mu");
    }
    throw UnsupportedFamilyError(family.name);
}

Matrix fisher_metric_numeric(const ParametricFamily& family, const Vector& theta,
                             const FisherQuadrature& quad) {
    if (!family.in_domain(theta)) {
        throw DomainError("fisher_metric_numeric: point outside parameter domain of '" + family.name + "'");
    }
    const int n = family.param_dim;
    double lo = 0.0;
    double hi = 0.0;
    if (family.kind == FamilyKind::gaussian) {
        lo = theta[0] - quad.gaussian_half_width * theta[1];
        hi = theta[0] + quad.gaussian_half_width * theta[1];
    } else {
        lo = 0.0;
        hi = quad.half_line_extent * theta[0];
    }
    std::vector<double> steps(static_cast<std::size_t>(n));
    for (int m = 0; m < n; ++m) {
        steps[static_cast<std::size_t>(m)] = quad.score_step * (1.0 + std::abs(theta[m]));
    }
    const quad::Rule& rule = quad::gauss_legendre(quad.nodes_per_panel);

    auto estimate = [&](int panels) {
        const auto nodes = quad::composite(lo, hi, panels, rule);
        Matrix g = Matrix::Zero(n, n);
        Vector score(n);
        for (std::size_t i = 0; i < nodes.x.size(); ++i) {
            const double x = nodes.x[i];
            const double p = std::exp(family.log_density(x, theta));
            for (int m = 0; m < n; ++m) {
                const double h = steps[static_cast<std::size_t>(m)];
                score[m] = (family.log_density(x, shifted(theta, m, h)) -
                            family.log_density(x, shifted(theta, m, -h))) /
                           (2.0 * h);
            }
            g.noalias() += (nodes.w[i] * p) * (score * score.transpose());
        }
        return g;
    };

    int panels = std::max(1, quad.initial_nodes / quad.nodes_per_panel);
    Matrix previous = estimate(panels);
    while (true) {
        panels *= 2;
        const Matrix current = estimate(panels);
        const double scale = std::max(1.0, current.cwiseAbs().maxCoeff());
        const double diff = (current - previous).cwiseAbs().maxCoeff();
        if (diff < quad.tolerance * scale) {
            return 0.5 * (current + current.transpose());
        }
        if (panels * quad.nodes_per_panel >= quad.max_nodes) {
            throw OracleFailure("Fisher quadrature did not converge for '" + family.name + "'",
                                previous.cwiseAbs().maxCoeff(), current.cwiseAbs().maxCoeff());
        }
        previous = current;
    }
}

MetricField product_manifold(const std::vector<MetricField>& factors) {
    if (factors.empty()) {
        throw ArgumentError("product_manifold needs at least one factor");
    }
    if (factors.size() == 1) {
        return factors.front();
    }
    std::vector<Interval> domain;
    std::vector<std::string> names;
    std::vector<int> offsets;
    bool separable = true;
    std::vector<MetricField::DensityFactor> density;
    int total = 0;
    for (std::size_t f = 0; f < factors.size(); ++f) {
        const auto& factor = factors[f];
        offsets.push_back(total);
        total += factor.dim();
        domain.insert(domain.end(), factor.domain().begin(), factor.domain().end());
        for (const auto& name : factor.coordinate_names()) {
            names.push_back(name + "_" + std::to_string(f + 1));
        }
        if (factor.separable_density()) {
            density.insert(density.end(), factor.separable_density()->begin(),
                           factor.separable_density()->end());
        } else {
            separable = false;
        }
    }
    auto sub_point = [offsets, factors](const Vector& p, std::size_t f) {
        return Vector(p.segment(offsets[f], factors[f].dim()));
    };
    auto value = [=](const Vector& p) {
        Matrix g = Matrix::Zero(total, total);
        for (std::size_t f = 0; f < factors.size(); ++f) {
            const int d = factors[f].dim();
            g.block(offsets[f], offsets[f], d, d) = factors[f].value(sub_point(p, f));
        }
        return g;
    };
    auto derivative = [=](const Vector& p) {
        Tensor3 out(total);
        for (std::size_t f = 0; f < factors.size(); ++f) {
            const int d = factors[f].dim();
            const int o = offsets[f];
            const Tensor3 block = factors[f].derivative(sub_point(p, f));
            for (int r = 0; r < d; ++r)
                for (int m = 0; m < d; ++m)
                    for (int n = 0; n < d; ++n) out(o + r, o + m, o + n) = block(r, m, n);
        }
        return out;
    };
    auto second = [=](const Vector& p) {
        Tensor4 out(total);
        for (std::size_t f = 0; f < factors.size(); ++f) {
            const int d = factors[f].dim();
            const int o = offsets[f];
            const Tensor4 block = factors[f].second_derivative(sub_point(p, f));
            for (int s = 0; s < d; ++s)
                for (int r = 0; r < d; ++r)
                    for (int m = 0; m < d; ++m)
                        for (int n = 0; n < d; ++n) out(o + s, o + r, o + m, o + n) = block(s, r, m, n);
        }
        return out;
    };
    const bool all_analytic = std::all_of(factors.begin(), factors.end(), [](const MetricField& m) {
        return m.provider() == MetricProvider::analytic;
    });
    return MetricField(std::move(domain), std::move(names), value, derivative, second,
                       all_analytic ? MetricProvider::analytic : MetricProvider::finite_difference,
                       separable ? std::optional(std::move(density)) : std::nullopt);
}

std::vector<int> grouped_to_interleaved(int l) {
    std::vector<int> map(static_cast<std::size_t>(2 * l));
    for (int k = 0; k < l; ++k) {
        map[static_cast<std::size_t>(k)] = 2 * k;          // mu_k
        map[static_cast<std::size_t>(l + k)] = 2 * k + 1;  // sigma_k
    }
    return map;
}

MetricField permute_coordinates(const MetricField& metric, const std::vector<int>& perm) {
    const int n = metric.dim();
    if (static_cast<int>(perm.size()) != n) {
        throw ArgumentError("permutation size does not match metric dimension");
    }
    std::vector<bool> seen(static_cast<std::size_t>(n), false);
    for (int i : perm) {
        if (i < 0 || i >= n || seen[static_cast<std::size_t>(i)]) {
            throw ArgumentError("coordinate map is not a permutation");
        }
        seen[static_cast<std::size_t>(i)] = true;
    }
    std::vector<Interval> domain;
    std::vector<std::string> names;
    for (int i : perm) {
        domain.push_back(metric.domain()[static_cast<std::size_t>(i)]);
        names.push_back(metric.coordinate_names()[static_cast<std::size_t>(i)]);
    }
    // old coordinate perm[i] <- new coordinate i
    auto to_old = [perm, n](const Vector& q) {
        Vector p(n);
        for (int i = 0; i < n; ++i) p[perm[static_cast<std::size_t>(i)]] = q[i];
        return p;
    };
    auto value = [=](const Vector& q) {
        const Matrix g = metric.value(to_old(q));
        Matrix out(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) out(i, j) = g(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]);
        return out;
    };
    auto P = [perm](int i) { return perm[static_cast<std::size_t>(i)]; };
    auto derivative = [=](const Vector& q) {
        const Tensor3 d = metric.derivative(to_old(q));
        Tensor3 out(n);
        for (int r = 0; r < n; ++r)
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) out(r, i, j) = d(P(r), P(i), P(j));
        return out;
    };
    auto second = [=](const Vector& q) {
        const Tensor4 d = metric.second_derivative(to_old(q));
        Tensor4 out(n);
        for (int s = 0; s < n; ++s)
            for (int r = 0; r < n; ++r)
                for (int i = 0; i < n; ++i)
                    for (int j = 0; j < n; ++j) out(s, r, i, j) = d(P(s), P(r), P(i), P(j));
        return out;
    };
    std::optional<std::vector<MetricField::DensityFactor>> density;
    if (metric.separable_density()) {
        density.emplace();
        for (int i : perm) density->push_back((*metric.separable_density())[static_cast<std::size_t>(i)]);
    }
    return MetricField(std::move(domain), std::move(names), value, derivative, second,
                       metric.provider(), std::move(density));
}

MetricField with_finite_differences(const MetricField& metric, double first_step, double second_step) {
    const int n = metric.dim();
    auto value = [metric](const Vector& p) { return metric.value(p); };
    auto derivative = [metric, n, first_step](const Vector& p) {
        Tensor3 out(n);
        for (int r = 0; r < n; ++r) {
            const double h = first_step * (1.0 + std::abs(p[r]));
            auto central = [&](double step) {
                return Matrix((metric.value(shifted(p, r, step)) - metric.value(shifted(p, r, -step))) /
                              (2.0 * step));
            };
            const Matrix d = (4.0 * central(0.5 * h) - central(h)) / 3.0;
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) out(r, i, j) = 0.5 * (d(i, j) + d(j, i));
        }
        return out;
    };
    auto second = [metric, n, second_step](const Vector& p) {
        Tensor4 out(n);
        const Matrix g0 = metric.value(p);
        for (int s = 0; s < n; ++s) {
            for (int r = s; r < n; ++r) {
                const double hs = second_step * (1.0 + std::abs(p[s]));
                const double hr = second_step * (1.0 + std::abs(p[r]));
                auto estimate = [&](double scale) -> Matrix {
                    if (r == s) {
                        const double h = hs * scale;
                        return (metric.value(shifted(p, s, h)) - 2.0 * g0 + metric.value(shifted(p, s, -h))) /
                               (h * h);
                    }
                    const double a = hs * scale;
                    const double b = hr * scale;
                    return (metric.value(shifted2(p, s, a, r, b)) - metric.value(shifted2(p, s, a, r, -b)) -
                            metric.value(shifted2(p, s, -a, r, b)) + metric.value(shifted2(p, s, -a, r, -b))) /
                           (4.0 * a * b);
                };
                const Matrix d = (4.0 * estimate(0.5) - estimate(1.0)) / 3.0;
                for (int i = 0; i < n; ++i)
                    for (int j = 0; j < n; ++j) {
                        const double v = 0.5 * (d(i, j) + d(j, i));
                        out(s, r, i, j) = v;
                        out(r, s, i, j) = v;
                    }
            }
        }
        return out;
    };
    return MetricField(metric.domain(), metric.coordinate_names(), value, derivative, second,
                       MetricProvider::finite_difference);
}

MetricField euclidean_metric(int dim) {
    if (dim < 1) {
        throw ArgumentError("euclidean_metric needs dim >= 1");
    }
    std::vector<Interval> domain(static_cast<std::size_t>(dim), Interval{-inf, inf});
    std::vector<std::string> names;
    for (int i = 0; i < dim; ++i) names.push_back("x" + std::to_string(i + 1));
    std::vector<MetricField::DensityFactor> density(static_cast<std::size_t>(dim), [](double) { return 1.0; });
    return MetricField(
        std::move(domain), std::move(names), [dim](const Vector&) { return Matrix(Matrix::Identity(dim, dim)); },
        [dim](const Vector&) { return Tensor3(dim); }, [dim](const Vector&) { return Tensor4(dim); },
        MetricProvider::analytic, std::move(density));
}

double oscillator_potential(const std::vector<double>& omegas, const Vector& theta) {
    double phi = 0.0;
    for (std::size_t k = 0; k < omegas.size(); ++k) {
        phi -= 0.5 * omegas[k] * omegas[k] * theta[static_cast<int>(k)] * theta[static_cast<int>(k)];
    }
    return phi;
}

MetricField conformal_oscillator_metric(const std::vector<double>& omegas) {
    const int l = static_cast<int>(omegas.size());
    if (l < 1) {
        throw ArgumentError("conformal_oscillator_metric needs at least one frequency");
    }
    std::vector<Interval> domain(static_cast<std::size_t>(l), Interval{-inf, inf});
    std::vector<std::string> names;
    for (int i = 0; i < l; ++i) names.push_back("theta_" + std::to_string(i + 1));
    auto value = [omegas, l](const Vector& p) {
        return Matrix((1.0 - oscillator_potential(omegas, p)) * Matrix::Identity(l, l));
    };
    auto derivative = [omegas, l](const Vector& p) {
        Tensor3 d(l);
        for (int r = 0; r < l; ++r) {
            const double w2 = omegas[static_cast<std::size_t>(r)] * omegas[static_cast<std::size_t>(r)];
            for (int m = 0; m < l; ++m) d(r, m, m) = w2 * p[r];
        }
        return d;
    };
    auto second = [omegas, l](const Vector&) {
        Tensor4 dd(l);
        for (int r = 0; r < l; ++r) {
            const double w2 = omegas[static_cast<std::size_t>(r)] * omegas[static_cast<std::size_t>(r)];
            for (int m = 0; m < l; ++m) dd(r, r, m, m) = w2;
        }
        return dd;
    };
    std::optional<std::vector<MetricField::DensityFactor>> density;
    if (l == 1) {
        const double w2 = omegas[0] * omegas[0];
        density.emplace(1, [w2](double x) { return std::sqrt(1.0 + 0.5 * w2 * x * x); });
    }
    return MetricField(std::move(domain), std::move(names), value, derivative, second,
                       MetricProvider::analytic, std::move(density));
}

}  // namespace igac
