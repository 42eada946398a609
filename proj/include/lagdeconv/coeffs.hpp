#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "lagdeconv/coeff_vector.hpp"
#include "lagdeconv/error.hpp"
#include "lagdeconv/grid.hpp"
#include "lagdeconv/laguerre.hpp"
#include "lagdeconv/toeplitz.hpp"

namespace lagdeconv {

/// Condition-number cutoff for the "full rank" test on Phi^T Phi and G G^T.
inline constexpr double kDefaultConditionThreshold = 1e6;

/// Least squares onto the columns of the design through a Householder QR.
/// The pseudo-inverse P = R^{-1} Q_1^T (M x n) is kept for repeated solves.
class LeastSquaresProjector {
public:
    explicit LeastSquaresProjector(const LaguerreContext& ctx, double rank_tol = 1e-13)
        : LeastSquaresProjector(ctx.design(), ctx.scale(), rank_tol) {}

    /// Any full-column-rank design; `scale` only tags the output coefficients.
    LeastSquaresProjector(const Eigen::MatrixXd& X, double scale, double rank_tol = 1e-13) : scale_(scale) {
        Eigen::HouseholderQR<Eigen::MatrixXd> qr(X);
        const auto m = X.cols();
        const Eigen::MatrixXd R = qr.matrixQR().topRows(m).triangularView<Eigen::Upper>();
        const double rmax = R.diagonal().cwiseAbs().maxCoeff();
        for (Eigen::Index k = 0; k < m; ++k) {
            if (!(std::abs(R(k, k)) > rank_tol * rmax)) {
                throw RankDeficient("design matrix is rank deficient at order " + std::to_string(k),
                                    static_cast<std::size_t>(k));
            }
        }
        const Eigen::MatrixXd Q1 = qr.householderQ() * Eigen::MatrixXd::Identity(X.rows(), m);
        pinv_ = R.triangularView<Eigen::Upper>().solve(Q1.transpose());
    }

    /// M x n matrix mapping samples to coefficients.
    const Eigen::MatrixXd& pseudo_inverse() const noexcept { return pinv_; }

    CoeffVector project(std::span<const double> samples) const {
        if (static_cast<Eigen::Index>(samples.size()) != pinv_.cols()) {
            throw InvalidArgument("project_samples: expected " + std::to_string(pinv_.cols()) + " samples, got " +
                                  std::to_string(samples.size()));
        }
        const Eigen::Map<const Eigen::VectorXd> y(samples.data(), static_cast<Eigen::Index>(samples.size()));
        const Eigen::VectorXd c = pinv_ * y;
        return CoeffVector({c.data(), c.data() + c.size()}, scale_);
    }

private:
    double scale_;
    Eigen::MatrixXd pinv_;
};

/// argmin_c ||design c - samples|| at the context's scale and order.
inline CoeffVector project_samples(const LaguerreContext& ctx, std::span<const double> samples) {
    return LeastSquaresProjector(ctx).project(samples);
}

/// eta in M = n^{(1+eta)/3}.
inline double implied_eta(std::size_t max_order, std::size_t n) {
    return 3.0 * std::log(static_cast<double>(max_order)) / std::log(static_cast<double>(n)) - 1.0;
}

/// Ratio of extreme singular values, infinite when the smallest is zero.
inline double condition_number(const Eigen::MatrixXd& m) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
    const auto& s = svd.singularValues();
    if (s.size() == 0) return std::numeric_limits<double>::infinity();
    const double lo = s(s.size() - 1);
    return lo > 0.0 ? s(0) / lo : std::numeric_limits<double>::infinity();
}

struct MaxOrderSelection {
    std::size_t max_order = 0;
    double eta = 0.0;
    double design_condition = 0.0;  ///< cond(Phi^T Phi) at the chosen order
    double kernel_condition = 0.0;  ///< cond(G G^T) at the chosen order
};

/// Largest M <= cap for which cond(Phi_M^T Phi_M) and cond(G_M G_M^T) are both
/// below `threshold`, with G_M built from the regression coefficients of the
/// kernel samples.
inline MaxOrderSelection select_max_order(const SampleGrid& grid, double scale, std::span<const double> g_samples,
                                          std::size_t cap = 25,
                                          double threshold = kDefaultConditionThreshold) {
    if (!(scale > 0.0)) throw InvalidArgument("select_max_order: scale must be positive");
    if (cap < 1) throw InvalidArgument("select_max_order: cap must be >= 1");
    if (g_samples.size() != grid.size()) throw InvalidArgument("select_max_order: kernel samples do not match grid");
    const std::size_t top = std::min(cap, grid.size());
    // The design is nested in M, so build it once at the top order.
    const LaguerreContext full(grid, scale, top);
    for (std::size_t m = top; m >= 1; --m) {
        const Eigen::MatrixXd X = full.design().leftCols(static_cast<Eigen::Index>(m));
        const double cx = condition_number(X);
        const double cgram = cx * cx;
        if (!(cgram < threshold)) continue;
        const LaguerreContext ctx(grid, scale, m);
        CoeffVector gc = [&] {
            try {
                return project_samples(ctx, g_samples);
            } catch (const RankDeficient&) {
                return CoeffVector(std::vector<double>(m, 0.0), scale);
            }
        }();
        const double cg = condition_number(from_kernel_coeffs(gc, scale).dense());
        const double cgg = cg * cg;
        if (!(cgg < threshold)) continue;
        return {m, implied_eta(m, grid.size()), cgram, cgg};
    }
    throw RankDeficient("select_max_order: no order M >= 1 passes the rank checks at scale " + std::to_string(scale),
                        0);
}

/// sum_k c_k phi_k(t) at each t.
inline std::vector<double> reconstruct(const CoeffVector& coeffs, std::span<const double> ts) {
    std::vector<double> out(ts.size(), 0.0);
    std::vector<double> basis(coeffs.size());
    for (std::size_t i = 0; i < ts.size(); ++i) {
        if (ts[i] < 0.0) throw InvalidArgument("reconstruct: evaluation points must be >= 0");
        laguerre_fns(coeffs.scale(), ts[i], basis);
        double s = 0.0;
        for (std::size_t k = 0; k < basis.size(); ++k) s += coeffs[k] * basis[k];
        out[i] = s;
    }
    return out;
}

inline double reconstruct(const CoeffVector& coeffs, double t) {
    const double ts[1] = {t};
    return reconstruct(coeffs, ts)[0];
}

}  // namespace lagdeconv
