/**
 * @file tensor.hpp
 * @brief Dense small-dimension vectors, matrices and rank-3/rank-4 arrays.
 */
#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <vector>

namespace igac {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Cube of side n, row-major: (a, b, c) -> data[(a*n + b)*n + c].
class Tensor3 {
public:
    Tensor3() = default;
    explicit Tensor3(int n) : n_(n), data_(static_cast<std::size_t>(n) * n * n, 0.0) {}

    [[nodiscard]] int dim() const noexcept { return n_; }
    double& operator()(int a, int b, int c) { return data_[index(a, b, c)]; }
    double operator()(int a, int b, int c) const { return data_[index(a, b, c)]; }
    [[nodiscard]] const std::vector<double>& data() const noexcept { return data_; }
    std::vector<double>& data() noexcept { return data_; }

private:
    [[nodiscard]] std::size_t index(int a, int b, int c) const {
        return (static_cast<std::size_t>(a) * n_ + b) * n_ + c;
    }
    int n_ = 0;
    std::vector<double> data_;
};

/// Hypercube of side n, row-major over four indices.
class Tensor4 {
public:
    Tensor4() = default;
    explicit Tensor4(int n) : n_(n), data_(static_cast<std::size_t>(n) * n * n * n, 0.0) {}

    [[nodiscard]] int dim() const noexcept { return n_; }
    double& operator()(int a, int b, int c, int d) { return data_[index(a, b, c, d)]; }
    double operator()(int a, int b, int c, int d) const { return data_[index(a, b, c, d)]; }
    [[nodiscard]] const std::vector<double>& data() const noexcept { return data_; }
    std::vector<double>& data() noexcept { return data_; }

private:
    [[nodiscard]] std::size_t index(int a, int b, int c, int d) const {
        return ((static_cast<std::size_t>(a) * n_ + b) * n_ + c) * n_ + d;
    }
    int n_ = 0;
    std::vector<double> data_;
};

}  // namespace igac
