/**
 * @file curvature.hpp
 * @brief Levi-Civita connection, Riemann/Ricci tensors and sectional curvatures.
 *
 * Index conventions:
 *   christoffel(r, m, n) = Gamma^r_{mn}
 *   riemann(a, b, c, d)  = R^a_{bcd} = d_c Gamma^a_{bd} - d_d Gamma^a_{bc}
 *                          + Gamma^a_{ce} Gamma^e_{bd} - Gamma^a_{de} Gamma^e_{bc}
 *   ricci(b, d)          = R^a_{bad}
 *   scalar               = g^{bd} R_{bd}
 * With these, K(X, Y) = R_{abcd} X^a Y^b X^c Y^d / (|X|^2 |Y|^2 - <X,Y>^2)
 * and the scalar is the sum of K over ordered orthonormal coordinate planes.
 */
#pragma once

#include "igac/manifold.hpp"
#include "igac/tensor.hpp"

namespace igac {

struct CurvatureReport {
    Vector point;
    Tensor3 christoffel;
    Tensor4 riemann;
    Matrix ricci;
    double scalar = 0.0;
    /// sectional(r, s) = K(e_r, e_s) for the Gram-Schmidt frame; zero on the diagonal.
    Matrix sectional;
};

/// Gamma^r_{mn} at p, from the metric's first derivatives.
[[nodiscard]] Tensor3 christoffel(const MetricField& metric, const Vector& p);

/// Contracts Gamma^r_{mn} u^m v^n.
[[nodiscard]] Vector contract_christoffel(const Tensor3& gamma, const Vector& u, const Vector& v);

struct Connection {
    Tensor3 christoffel;
    Tensor4 riemann;
};

/// Christoffel symbols and R^a_{bcd} only (no contractions or frame).
[[nodiscard]] Connection connection_and_riemann(const MetricField& metric, const Vector& p);

[[nodiscard]] CurvatureReport riemann_ricci_scalar(const MetricField& metric, const Vector& p);

/// Fully covariant R_{abcd} = g_{ae} R^e_{bcd}.
[[nodiscard]] Tensor4 lower_first_index(const Tensor4& riemann, const Matrix& g);

/// g-orthonormal frame from Gram-Schmidt on coordinate directions in index
/// order; column i is e_i.
[[nodiscard]] Matrix orthonormal_frame(const Matrix& g);

/// K(e_r, e_s) for the orthonormalized coordinate pair (r != s).
[[nodiscard]] double sectional_curvature(const MetricField& metric, const Vector& p, int r, int s);

}  // namespace igac
