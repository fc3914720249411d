/**
 * @file quadrature.hpp
 * @brief Gauss-Legendre rules, composite panels and tensor-product boxes.
 */
#pragma once

#include <functional>
#include <span>
#include <vector>

namespace igac::quad {

/// Nodes and weights on [-1, 1].
struct Rule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// n-point Gauss-Legendre rule. Rules are computed once per n and cached.
[[nodiscard]] const Rule& gauss_legendre(int n);

/// Nodes/weights of `rule` mapped onto [a, b].
struct MappedNodes {
    std::vector<double> x;
    std::vector<double> w;
};

/// Composite rule: `panels` equal panels of `rule` over [a, b].
[[nodiscard]] MappedNodes composite(double a, double b, int panels, const Rule& rule);

/// Breakpoints for [a, b] such that no panel spans more than a factor
/// `max_ratio` in |x| (geometric grading toward the end nearest zero).
/// Intervals crossing zero are split there first. Keeps integrands like
/// 1/x or 1/x^2 resolved over ranges of many decades.
[[nodiscard]] std::vector<double> graded_breakpoints(double a, double b, double max_ratio = 2.0);

/// Graded composite rule over [a, b] with `rule` on each panel.
[[nodiscard]] MappedNodes graded(double a, double b, const Rule& rule, double max_ratio = 2.0);

/// Integral of f over [a, b] with the graded composite rule.
[[nodiscard]] double integrate_graded(const std::function<double(double)>& f, double a, double b,
                                      int nodes_per_panel = 32, double max_ratio = 2.0);

/// Tensor-product integral of f over the box prod [lower_i, upper_i].
[[nodiscard]] double integrate_box(const std::function<double(std::span<const double>)>& f,
                                   std::span<const double> lower, std::span<const double> upper,
                                   int nodes_per_panel = 32, double max_ratio = 2.0);

}  // namespace igac::quad
