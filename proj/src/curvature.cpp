#include "igac/curvature.hpp"

#include "igac/errors.hpp"

#include <cmath>

namespace igac {

namespace {

struct InverseMetric {
    Matrix g;
    Matrix inverse;
};

InverseMetric invert(const MetricField& metric, const Vector& p) {
    InverseMetric out{metric.value(p), {}};
    if (!out.g.allFinite()) {
        throw SingularityError("metric is not finite at the requested point");
    }
    Eigen::LLT<Matrix> llt(out.g);
    if (llt.info() != Eigen::Success) {
        throw SingularityError("metric is not positive-definite at the requested point");
    }
    out.inverse = llt.solve(Matrix::Identity(out.g.rows(), out.g.cols()));
    if (!out.inverse.allFinite()) {
        throw SingularityError("metric inverse is not finite at the requested point");
    }
    return out;
}

// C_{lmn} = d_m g_{ln} + d_n g_{lm} - d_l g_{mn}; symmetric in (m, n).
double first_kind(const Tensor3& dg, int l, int m, int n) {
    return dg(m, l, n) + dg(n, l, m) - dg(l, m, n);
}

Tensor3 christoffel_from(const Matrix& inverse, const Tensor3& dg) {
    const int n = dg.dim();
    Tensor3 gamma(n);
    for (int r = 0; r < n; ++r) {
        for (int a = 0; a < n; ++a) {
            for (int b = a; b < n; ++b) {
                double sum = 0.0;
                for (int l = 0; l < n; ++l) sum += inverse(r, l) * first_kind(dg, l, a, b);
                gamma(r, a, b) = 0.5 * sum;
                gamma(r, b, a) = 0.5 * sum;
            }
        }
    }
    return gamma;
}

}  // namespace

Tensor3 christoffel(const MetricField& metric, const Vector& p) {
    const auto inv = invert(metric, p);
    return christoffel_from(inv.inverse, metric.derivative(p));
}

Vector contract_christoffel(const Tensor3& gamma, const Vector& u, const Vector& v) {
    const int n = gamma.dim();
    Vector out = Vector::Zero(n);
    for (int r = 0; r < n; ++r) {
        double sum = 0.0;
        for (int a = 0; a < n; ++a) {
            if (u[a] == 0.0) continue;
            for (int b = 0; b < n; ++b) sum += gamma(r, a, b) * u[a] * v[b];
        }
        out[r] = sum;
    }
    return out;
}

Tensor4 lower_first_index(const Tensor4& riemann, const Matrix& g) {
    const int n = riemann.dim();
    Tensor4 out(n);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            for (int c = 0; c < n; ++c)
                for (int d = 0; d < n; ++d) {
                    double sum = 0.0;
                    for (int e = 0; e < n; ++e) sum += g(a, e) * riemann(e, b, c, d);
                    out(a, b, c, d) = sum;
                }
    return out;
}

Matrix orthonormal_frame(const Matrix& g) {
    const int n = static_cast<int>(g.rows());
    Matrix frame = Matrix::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        Vector v = Vector::Unit(n, i);
        for (int j = 0; j < i; ++j) {
            const Vector ej = frame.col(j);
            v -= (ej.dot(g * v)) * ej;
        }
        const double norm2 = v.dot(g * v);
        if (!(norm2 > 0.0)) {
            throw SingularityError("Gram-Schmidt produced a null direction");
        }
        frame.col(i) = v / std::sqrt(norm2);
    }
    return frame;
}

namespace {

Connection connection_from(const MetricField& metric, const Vector& p, const InverseMetric& inv) {
    const int n = metric.dim();
    const Tensor3 dg = metric.derivative(p);
    const Tensor4 ddg = metric.second_derivative(p);

    Connection report;
    report.christoffel = christoffel_from(inv.inverse, dg);
    const Tensor3& gamma = report.christoffel;

    // d_s g^{rl} = -g^{ra} d_s g_{ab} g^{bl}
    Tensor3 dinv(n);
    for (int s = 0; s < n; ++s) {
        Matrix ds(n, n);
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) ds(a, b) = dg(s, a, b);
        const Matrix v = -inv.inverse * ds * inv.inverse;
        for (int r = 0; r < n; ++r)
            for (int l = 0; l < n; ++l) dinv(s, r, l) = v(r, l);
    }

    // dgamma(s, r, a, b) = d_s Gamma^r_{ab}
    Tensor4 dgamma(n);
    for (int s = 0; s < n; ++s)
        for (int r = 0; r < n; ++r)
            for (int a = 0; a < n; ++a)
                for (int b = a; b < n; ++b) {
                    double sum = 0.0;
                    for (int l = 0; l < n; ++l) {
                        const double dfirst = ddg(s, a, l, b) + ddg(s, b, l, a) - ddg(s, l, a, b);
                        sum += dinv(s, r, l) * first_kind(dg, l, a, b) + inv.inverse(r, l) * dfirst;
                    }
                    dgamma(s, r, a, b) = 0.5 * sum;
                    dgamma(s, r, b, a) = 0.5 * sum;
                }

    report.riemann = Tensor4(n);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            for (int c = 0; c < n; ++c)
                for (int d = c + 1; d < n; ++d) {
                    double v = dgamma(c, a, b, d) - dgamma(d, a, b, c);
                    for (int e = 0; e < n; ++e) {
                        v += gamma(a, c, e) * gamma(e, b, d) - gamma(a, d, e) * gamma(e, b, c);
                    }
                    report.riemann(a, b, c, d) = v;
                    report.riemann(a, b, d, c) = -v;
                }
    return report;
}

}  // namespace

Connection connection_and_riemann(const MetricField& metric, const Vector& p) {
    return connection_from(metric, p, invert(metric, p));
}

CurvatureReport riemann_ricci_scalar(const MetricField& metric, const Vector& p) {
    const int n = metric.dim();
    const auto inv = invert(metric, p);
    Connection connection = connection_from(metric, p, inv);
    CurvatureReport report;
    report.point = p;
    report.christoffel = std::move(connection.christoffel);
    report.riemann = std::move(connection.riemann);

    report.ricci = Matrix::Zero(n, n);
    for (int b = 0; b < n; ++b)
        for (int d = 0; d < n; ++d) {
            double sum = 0.0;
            for (int a = 0; a < n; ++a) sum += report.riemann(a, b, a, d);
            report.ricci(b, d) = sum;
        }
    report.scalar = (inv.inverse.cwiseProduct(report.ricci)).sum();

    const Tensor4 lowered = lower_first_index(report.riemann, inv.g);
    const Matrix frame = orthonormal_frame(inv.g);
    report.sectional = Matrix::Zero(n, n);
    for (int r = 0; r < n; ++r)
        for (int s = 0; s < n; ++s) {
            if (r == s) continue;
            const Vector x = frame.col(r);
            const Vector y = frame.col(s);
            double k = 0.0;
            for (int a = 0; a < n; ++a)
                for (int b = 0; b < n; ++b)
                    for (int c = 0; c < n; ++c)
                        for (int d = 0; d < n; ++d) k += lowered(a, b, c, d) * x[a] * y[b] * x[c] * y[d];
            report.sectional(r, s) = k;
        }
    return report;
}

double sectional_curvature(const MetricField& metric, const Vector& p, int r, int s) {
    const int n = metric.dim();
    if (r == s) {
        throw ArgumentError("sectional_curvature needs two distinct axes");
    }
    if (r < 0 || s < 0 || r >= n || s >= n) {
        throw ArgumentError("sectional_curvature axis out of range");
    }
    return riemann_ricci_scalar(metric, p).sectional(r, s);
}

}  // namespace igac
