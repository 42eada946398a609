#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "lagdeconv/error.hpp"
#include "lagdeconv/grid.hpp"
#include "lagdeconv/quadrature.hpp"

namespace lagdeconv {

/// L_order(x) by the three-term recurrence
/// L_{k+1} = ((2k+1-x) L_k - k L_{k-1}) / (k+1).
inline double laguerre_poly(int order, double x) {
    if (order < 0) throw InvalidArgument("laguerre_poly: order must be >= 0");
    if (order == 0) return 1.0;
    double prev = 1.0;
    double cur = 1.0 - x;
    for (int k = 1; k < order; ++k) {
        const double next = ((2.0 * k + 1.0 - x) * cur - k * prev) / (k + 1.0);
        prev = cur;
        cur = next;
    }
    return cur;
}

/// Writes phi_0(t)..phi_{out.size()-1}(t) for phi_k(t) = sqrt(2a) e^{-at} L_k(2at).
///
/// The e^{-at} factor is folded into the starting values so the recurrence runs
/// on damped quantities bounded by 1 in magnitude.
inline void laguerre_fns(double scale, double t, std::span<double> out) {
    if (out.empty()) return;
    const double x = 2.0 * scale * t;
    const double norm = std::sqrt(2.0 * scale);
    double prev = std::exp(-scale * t);
    out[0] = norm * prev;
    if (out.size() == 1) return;
    double cur = (1.0 - x) * prev;
    out[1] = norm * cur;
    for (std::size_t k = 1; k + 1 < out.size(); ++k) {
        const double kd = static_cast<double>(k);
        const double next = ((2.0 * kd + 1.0 - x) * cur - kd * prev) / (kd + 1.0);
        prev = cur;
        cur = next;
        out[k + 1] = norm * cur;
    }
}

/// phi_order(t) at scale a.
inline double laguerre_fn(int order, double scale, double t) {
    if (order < 0) throw InvalidArgument("laguerre_fn: order must be >= 0");
    if (!(scale > 0.0)) throw InvalidArgument("laguerre_fn: scale must be positive");
    std::vector<double> buf(static_cast<std::size_t>(order) + 1);
    laguerre_fns(scale, t, buf);
    return buf.back();
}

/// Scale, truncation and the sampled basis over a grid.
///
/// design(i, k) = phi_k(t_i); gram = design^T design. Immutable once built.
class LaguerreContext {
public:
    LaguerreContext(SampleGrid grid, double scale, std::size_t max_order)
        : grid_(std::move(grid)), scale_(scale), max_order_(max_order) {
        if (!(scale_ > 0.0)) throw InvalidArgument("LaguerreContext: scale must be positive");
        if (max_order_ < 1) throw InvalidArgument("LaguerreContext: max_order must be >= 1");
        if (max_order_ > grid_.size()) {
            throw InvalidArgument("LaguerreContext: max_order " + std::to_string(max_order_) +
                                  " exceeds the number of observations " +
                                  std::to_string(grid_.size()));
        }
        const auto n = static_cast<Eigen::Index>(grid_.size());
        const auto m = static_cast<Eigen::Index>(max_order_);
        design_.resize(n, m);
        std::vector<double> row(max_order_);
        for (Eigen::Index i = 0; i < n; ++i) {
            laguerre_fns(scale_, grid_[static_cast<std::size_t>(i)], row);
            for (Eigen::Index k = 0; k < m; ++k) design_(i, k) = row[static_cast<std::size_t>(k)];
        }
        gram_ = design_.transpose() * design_;
    }

    const SampleGrid& grid() const noexcept { return grid_; }
    double scale() const noexcept { return scale_; }
    std::size_t max_order() const noexcept { return max_order_; }
    std::size_t size() const noexcept { return grid_.size(); }
    const Eigen::MatrixXd& design() const noexcept { return design_; }
    const Eigen::MatrixXd& gram() const noexcept { return gram_; }

private:
    SampleGrid grid_;
    double scale_;
    std::size_t max_order_;
    Eigen::MatrixXd design_;
    Eigen::MatrixXd gram_;
};

inline LaguerreContext build_context(const SampleGrid& grid, double scale, std::size_t max_order) {
    return LaguerreContext(grid, scale, max_order);
}

/// Both sides of
///   int_0^t phi_k(x) phi_j(t-x) dx = (2a)^{-1/2} [phi_{k+j}(t) - phi_{k+j+1}(t)]
/// as (adaptive quadrature of the left, closed form on the right).
inline std::pair<double, double> convolve_basis_identity_check(int k, int j, double scale, double t) {
    if (k < 0 || j < 0) throw InvalidArgument("convolve_basis_identity_check: negative order");
    if (t < 0.0) throw InvalidArgument("convolve_basis_identity_check: t must be >= 0");
    const double lhs = quadrature::integrate(
        [&](double x) { return laguerre_fn(k, scale, x) * laguerre_fn(j, scale, t - x); }, 0.0, t,
        1e-13);
    const double rhs = (laguerre_fn(k + j, scale, t) - laguerre_fn(k + j + 1, scale, t)) /
                       std::sqrt(2.0 * scale);
    return {lhs, rhs};
}

}  // namespace lagdeconv
