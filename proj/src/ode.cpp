#include "igac/ode.hpp"

#include "igac/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace igac::ode {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

// Continuous extension: y(t + s h) = y + h * sum_k K_k * (P_k1 s + P_k2 s^2 + P_k3 s^3 + P_k4 s^4).
constexpr double P[7][4] = {
    {1.0, -8048581381.0 / 2820520608.0, 8663915743.0 / 2820520608.0, -12715105075.0 / 11282082432.0},
    {0.0, 0.0, 0.0, 0.0},
    {0.0, 131558114200.0 / 32700410799.0, -68118460800.0 / 10900136933.0, 87487479700.0 / 32700410799.0},
    {0.0, -1754552775.0 / 470086768.0, 14199869525.0 / 1410260304.0, -10690763975.0 / 1880347072.0},
    {0.0, 127303824393.0 / 49829197408.0, -318862633887.0 / 49829197408.0, 701980252875.0 / 199316789632.0},
    {0.0, -282668133.0 / 205662961.0, 2019193451.0 / 616988883.0, -1453857185.0 / 822651844.0},
    {0.0, 40617522.0 / 29380423.0, -110615467.0 / 29380423.0, 69997945.0 / 29380423.0},
};

bool all_finite(std::span<const double> v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

}  // namespace

Solution integrate(const Rhs& f, std::span<const double> y0, std::span<const double> grid,
                   const Options& options, const StateCheck& check) {
    if (grid.size() < 2) {
        throw ArgumentError("integration grid needs at least two times");
    }
    for (std::size_t i = 1; i < grid.size(); ++i) {
        if (!(grid[i] > grid[i - 1])) {
            throw ArgumentError("integration grid must be strictly increasing");
        }
    }
    const std::size_t n = y0.size();
    Solution sol;
    sol.t.assign(grid.begin(), grid.end());
    sol.y.reserve(grid.size());

    std::vector<double> y(y0.begin(), y0.end());
    if (check && !check(y)) {
        throw DomainExitError("initial state outside the admissible domain", grid.front(), y);
    }
    sol.y.push_back(y);

    std::vector<std::vector<double>> k(7, std::vector<double>(n));
    std::vector<double> tmp(n), ynew(n), err(n);
    double t = grid.front();
    const double t_end = grid.back();
    f(t, y, k[0]);
    if (!all_finite(k[0])) {
        throw NumericalError("non_finite", "derivative is not finite at the initial state");
    }

    auto scale = [&](double a, double b) {
        return options.atol + options.rtol * std::max(std::abs(a), std::abs(b));
    };

    // Initial step (Hairer, Norsett & Wanner, II.4).
    double h = 0.0;
    {
        double d0 = 0.0, d1 = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double sc = scale(y[i], y[i]);
            d0 += (y[i] / sc) * (y[i] / sc);
            d1 += (k[0][i] / sc) * (k[0][i] / sc);
        }
        d0 = std::sqrt(d0 / std::max<std::size_t>(n, 1));
        d1 = std::sqrt(d1 / std::max<std::size_t>(n, 1));
        double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
        h0 = std::min(h0, t_end - t);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + h0 * k[0][i];
        f(t + h0, tmp, k[1]);
        double d2 = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double sc = scale(y[i], y[i]);
            const double v = (k[1][i] - k[0][i]) / sc;
            d2 += v * v;
        }
        d2 = std::sqrt(d2 / std::max<std::size_t>(n, 1)) / h0;
        const double h1 = (std::max(d1, d2) <= 1e-15) ? std::max(1e-6, h0 * 1e-3)
                                                       : std::pow(0.01 / std::max(d1, d2), 0.2);
        h = std::min(100.0 * h0, h1);
        if (!std::isfinite(h) || h <= 0.0) h = 1e-6;
    }

    std::size_t next = 1;
    bool rejected_last = false;
    while (next < grid.size()) {
        if (sol.accepted_steps + sol.rejected_steps > options.max_steps) {
            throw StiffnessError("maximum number of steps exceeded", t, h);
        }
        const double remaining = t_end - t;
        const double h_min = 16.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t));
        bool last = false;
        if (h >= remaining || remaining - h < h_min) {
            h = remaining;
            last = true;
        }
        if (!last && h < h_min) {
            std::ostringstream msg;
            msg << "step size underflow at tau=" << t;
            throw StiffnessError(msg.str(), t, h);
        }

        // A stage that both leaves the domain and breaks the right-hand side
        // means the curve is running off the manifold's representable part.
        bool stage_left_domain = false;
        auto stage = [&](int out, double ct, std::initializer_list<std::pair<int, double>> coeffs) {
            for (std::size_t i = 0; i < n; ++i) {
                double acc = 0.0;
                for (const auto& [j, a] : coeffs) acc += a * k[static_cast<std::size_t>(j)][i];
                tmp[i] = y[i] + h * acc;
            }
            f(t + ct * h, tmp, k[static_cast<std::size_t>(out)]);
            if (check && !all_finite(k[static_cast<std::size_t>(out)]) && !check(tmp)) stage_left_domain = true;
        };
        stage(1, c2, {{0, a21}});
        stage(2, c3, {{0, a31}, {1, a32}});
        stage(3, c4, {{0, a41}, {1, a42}, {2, a43}});
        stage(4, c5, {{0, a51}, {1, a52}, {2, a53}, {3, a54}});
        stage(5, 1.0, {{0, a61}, {1, a62}, {2, a63}, {3, a64}, {4, a65}});
        for (std::size_t i = 0; i < n; ++i) {
            ynew[i] = y[i] + h * (b1 * k[0][i] + b3 * k[2][i] + b4 * k[3][i] + b5 * k[4][i] + b6 * k[5][i]);
        }
        const double t_new = last ? t_end : t + h;
        f(t_new, ynew, k[6]);

        double err_norm = 0.0;
        bool finite = all_finite(ynew) && all_finite(k[6]);
        if (finite) {
            for (std::size_t i = 0; i < n; ++i) {
                const double e = h * (e1 * k[0][i] + e3 * k[2][i] + e4 * k[3][i] + e5 * k[4][i] +
                                      e6 * k[5][i] + e7 * k[6][i]);
                const double v = e / scale(y[i], ynew[i]);
                err_norm += v * v;
            }
            err_norm = std::sqrt(err_norm / std::max<std::size_t>(n, 1));
            finite = std::isfinite(err_norm);
        }
        if (!finite && check && (stage_left_domain || !check(ynew)) && h < 1e-6 * std::max(1.0, std::abs(t))) {
            std::ostringstream msg;
            msg << "trajectory left the parameter domain after tau=" << t;
            throw DomainExitError(msg.str(), t, y);
        }
        if (!finite || err_norm > 1.0) {
            ++sol.rejected_steps;
            const double factor = finite ? std::max(0.2, 0.9 * std::pow(err_norm, -0.2)) : 0.25;
            h *= std::min(factor, 1.0);
            rejected_last = true;
            continue;
        }

        if (check && !check(ynew)) {
            std::ostringstream msg;
            msg << "trajectory left the parameter domain after tau=" << t;
            throw DomainExitError(msg.str(), t, y);
        }

        // Emit grid points inside (t, t_new].
        while (next < grid.size() && grid[next] <= t_new) {
            if (next == grid.size() - 1 || grid[next] == t_new) {
                sol.y.push_back(ynew);
            } else {
                const double s = (grid[next] - t) / h;
                std::vector<double> out(n);
                for (std::size_t i = 0; i < n; ++i) {
                    double acc = 0.0;
                    for (std::size_t j = 0; j < 7; ++j) {
                        const double q = s * (P[j][0] + s * (P[j][1] + s * (P[j][2] + s * P[j][3])));
                        acc += k[j][i] * q;
                    }
                    out[i] = y[i] + h * acc;
                }
                sol.y.push_back(std::move(out));
            }
            ++next;
        }

        ++sol.accepted_steps;
        t = t_new;
        y.swap(ynew);
        std::swap(k[0], k[6]);

        double factor = err_norm == 0.0 ? 5.0 : 0.9 * std::pow(err_norm, -0.2);
        factor = std::clamp(factor, 0.2, 5.0);
        if (rejected_last) factor = std::min(factor, 1.0);
        rejected_last = false;
        h *= factor;
        if (last) break;
    }
    return sol;
}

}  // namespace igac::ode
