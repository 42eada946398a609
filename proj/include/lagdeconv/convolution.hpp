#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "lagdeconv/error.hpp"
#include "lagdeconv/grid.hpp"

namespace lagdeconv {

/// Piecewise-linear interpolant of (xs, ys) at x, held constant outside [xs.front(), xs.back()].
inline double interp_linear(std::span<const double> xs, std::span<const double> ys, double x) {
    if (xs.empty()) return 0.0;
    if (x <= xs.front()) return ys.front();
    if (x >= xs.back()) return ys.back();
    const auto it = std::upper_bound(xs.begin(), xs.end(), x);
    const auto j = static_cast<std::size_t>(it - xs.begin());
    const double x0 = xs[j - 1], x1 = xs[j];
    if (x1 == x0) return ys[j];
    const double w = (x - x0) / (x1 - x0);
    return (1.0 - w) * ys[j - 1] + w * ys[j];
}

/// Trapezoid discretization of int_0^t g(t - tau) f(tau) dtau on the grid:
/// (A f)_i approximates q(t_i) from f(t_1..t_i). Kernel values at lags that
/// fall between nodes are linearly interpolated from the samples. When t_1 > 0
/// the stretch [0, t_1] gets a single-node rule on f(t_1).
struct ConvMatrix {
    Eigen::MatrixXd entries;

    std::size_t size() const noexcept { return static_cast<std::size_t>(entries.rows()); }

    std::vector<double> apply(std::span<const double> f) const {
        if (f.size() != size()) throw InvalidArgument("ConvMatrix::apply: size mismatch");
        const Eigen::Map<const Eigen::VectorXd> x(f.data(), static_cast<Eigen::Index>(f.size()));
        const Eigen::VectorXd y = entries * x;
        return {y.data(), y.data() + y.size()};
    }
};

inline ConvMatrix conv_matrix(const SampleGrid& grid, std::span<const double> g_samples) {
    const std::size_t n = grid.size();
    if (g_samples.size() != n) {
        throw InvalidArgument("conv_matrix: " + std::to_string(g_samples.size()) + " kernel samples for " +
                              std::to_string(n) + " grid points");
    }
    const auto t = grid.times();
    ConvMatrix out{Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n))};
    for (std::size_t i = 0; i < n; ++i) {
        const auto ii = static_cast<Eigen::Index>(i);
        if (t[0] > 0.0) out.entries(ii, 0) += t[0] * interp_linear(t, g_samples, t[i] - t[0]);
        for (std::size_t j = 0; j < i; ++j) {
            const double h = t[j + 1] - t[j];
            const auto jj = static_cast<Eigen::Index>(j);
            out.entries(ii, jj) += 0.5 * h * interp_linear(t, g_samples, t[i] - t[j]);
            out.entries(ii, jj + 1) += 0.5 * h * interp_linear(t, g_samples, t[i] - t[j + 1]);
        }
    }
    return out;
}

}  // namespace lagdeconv
