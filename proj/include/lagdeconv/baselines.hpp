#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "lagdeconv/convolution.hpp"
#include "lagdeconv/deconvolve.hpp"
#include "lagdeconv/error.hpp"
#include "lagdeconv/grid.hpp"

namespace lagdeconv {

/// SVD of a convolution matrix, reused across filter parameters.
/// Singular values at or below n * eps * s_max are treated as exact zeros.
class SvdFilter {
public:
    explicit SvdFilter(const ConvMatrix& conv) : A_(conv.entries) {
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(A_, Eigen::ComputeFullU | Eigen::ComputeFullV);
        U_ = svd.matrixU();
        V_ = svd.matrixV();
        s_ = svd.singularValues();
        const double cut = static_cast<double>(A_.rows()) * std::numeric_limits<double>::epsilon() *
                           (s_.size() ? s_(0) : 0.0);
        rank_ = 0;
        for (Eigen::Index i = 0; i < s_.size(); ++i)
            if (s_(i) > cut) ++rank_;
    }

    std::size_t size() const noexcept { return static_cast<std::size_t>(A_.rows()); }
    std::size_t rank() const noexcept { return static_cast<std::size_t>(rank_); }
    const Eigen::VectorXd& singular_values() const noexcept { return s_; }
    double top_singular_value() const noexcept { return s_.size() ? s_(0) : 0.0; }
    const Eigen::MatrixXd& matrix() const noexcept { return A_; }

    /// V S (S^2 + lambda)^{-1} U^T y.
    Eigen::VectorXd tikhonov(const Eigen::VectorXd& y, double lambda) const {
        if (!(lambda >= 0.0)) throw InvalidArgument("tikhonov: lambda must be >= 0");
        const Eigen::VectorXd uy = U_.transpose() * y;
        Eigen::VectorXd w = Eigen::VectorXd::Zero(s_.size());
        for (Eigen::Index i = 0; i < rank_; ++i) w(i) = s_(i) / (s_(i) * s_(i) + lambda) * uy(i);
        return V_ * w;
    }

    /// V S_k^+ U^T y with the drop_k smallest singular values removed.
    Eigen::VectorXd tsvd(const Eigen::VectorXd& y, std::size_t drop_k) const {
        if (drop_k >= size()) {
            throw InvalidArgument("tsvd: drop_k = " + std::to_string(drop_k) + " must be below n = " +
                                  std::to_string(size()));
        }
        const Eigen::VectorXd uy = U_.transpose() * y;
        const auto keep = std::min<Eigen::Index>(rank_, s_.size() - static_cast<Eigen::Index>(drop_k));
        Eigen::VectorXd w = Eigen::VectorXd::Zero(s_.size());
        for (Eigen::Index i = 0; i < keep; ++i) w(i) = uy(i) / s_(i);
        return V_ * w;
    }

private:
    Eigen::MatrixXd A_;
    Eigen::MatrixXd U_;
    Eigen::MatrixXd V_;
    Eigen::VectorXd s_;
    Eigen::Index rank_ = 0;
};

namespace detail {
inline Eigen::VectorXd as_vector(std::span<const double> v) {
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}
inline std::vector<double> as_std(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }
}  // namespace detail

inline std::vector<double> tikhonov(const ConvMatrix& conv, std::span<const double> y, double lambda) {
    if (y.size() != conv.size()) throw InvalidArgument("tikhonov: size mismatch");
    return detail::as_std(SvdFilter(conv).tikhonov(detail::as_vector(y), lambda));
}

inline std::vector<double> tsvd(const ConvMatrix& conv, std::span<const double> y, std::size_t drop_k) {
    if (y.size() != conv.size()) throw InvalidArgument("tsvd: size mismatch");
    return detail::as_std(SvdFilter(conv).tsvd(detail::as_vector(y), drop_k));
}

struct SmoothResult {
    std::vector<double> values;
    double bandwidth = 0.0;
    double cv_score = std::numeric_limits<double>::quiet_NaN();  ///< mean squared LOO residual
};

/// Local linear fit with tricube weights at bandwidth h. Returns the fit and
/// its leave-one-out score, or nullopt when some window holds fewer than 3
/// points or is degenerate.
inline std::optional<SmoothResult> local_linear(const SampleGrid& grid, std::span<const double> y, double h) {
    const auto t = grid.times();
    const std::size_t n = t.size();
    SmoothResult out;
    out.values.resize(n);
    out.bandwidth = h;
    double loo = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double s0 = 0, s1 = 0, s2 = 0, r0 = 0, r1 = 0, wi = 0;
        std::size_t count = 0;
        for (std::size_t j = 0; j < n; ++j) {
            const double d = std::abs(t[j] - t[i]) / h;
            if (d >= 1.0) continue;
            const double u = 1.0 - d * d * d;
            const double w = u * u * u;
            const double x = t[j] - t[i];
            s0 += w;
            s1 += w * x;
            s2 += w * x * x;
            r0 += w * y[j];
            r1 += w * x * y[j];
            if (j == i) wi = w;
            ++count;
        }
        const double det = s0 * s2 - s1 * s1;
        if (count < 3 || !(det > 1e-14 * s0 * s2)) return std::nullopt;
        out.values[i] = (s2 * r0 - s1 * r1) / det;
        const double lii = wi * s2 / det;
        if (!(lii < 1.0 - 1e-12)) return std::nullopt;
        const double e = (y[i] - out.values[i]) / (1.0 - lii);
        loo += e * e;
    }
    out.cv_score = loo / static_cast<double>(n);
    return out;
}

/// Bandwidths tried by presmooth when none is given: 20 log-spaced values from
/// three average spacings to half the observed span.
inline std::vector<double> default_bandwidths(const SampleGrid& grid) {
    const double span = grid[grid.size() - 1] - grid[0];
    return log_grid(3.0 * span / static_cast<double>(grid.size()), 0.5 * span, 20);
}

/// Local linear smoother of y. A given bandwidth is used as is; otherwise the
/// default grid is searched by leave-one-out cross-validation.
inline SmoothResult presmooth(const SampleGrid& grid, std::span<const double> y,
                              std::optional<double> bandwidth = std::nullopt) {
    if (y.size() != grid.size()) throw InvalidArgument("presmooth: signal length does not match grid");
    if (bandwidth) {
        if (!(*bandwidth > 0.0)) throw InvalidArgument("presmooth: bandwidth must be positive");
        auto r = local_linear(grid, y, *bandwidth);
        if (!r) throw InvalidArgument("presmooth: bandwidth leaves a window with fewer than 3 usable points");
        return *r;
    }
    std::optional<SmoothResult> best;
    for (double h : default_bandwidths(grid)) {
        auto r = local_linear(grid, y, h);
        if (!r) continue;
        if (!best || r->cv_score <= best->cv_score) best = std::move(r);
    }
    if (!best) throw InvalidArgument("presmooth: no bandwidth in the default grid is usable");
    return *best;
}

enum class BaselineMethod { tikhonov, tsvd };

inline const char* to_string(BaselineMethod m) { return m == BaselineMethod::tikhonov ? "tikhonov" : "tsvd"; }

struct BaselineFit {
    double hyperparameter = 0.0;  ///< lambda, or drop_k
    std::vector<double> solution;
    double residual = 0.0;  ///< ||A f - q_tilde||
};

/// lambda grid: 40 log-spaced points in [1e-8, 1e2] * s_max^2.
inline std::vector<double> tikhonov_lambda_grid(const SvdFilter& svd) {
    const double s = svd.top_singular_value();
    const double s2 = std::max(s * s, std::numeric_limits<double>::min());
    return log_grid(1e-8 * s2, 1e2 * s2, 40);
}

/// Grid search for the hyperparameter minimizing ||A f - q_tilde||. On ties the
/// more regularized candidate (larger lambda, larger drop_k) wins.
inline BaselineFit tune_baseline(const SvdFilter& svd, std::span<const double> y, std::span<const double> q_tilde,
                                 BaselineMethod method) {
    if (y.size() != svd.size() || q_tilde.size() != svd.size()) throw InvalidArgument("tune_baseline: size mismatch");
    const Eigen::VectorXd yv = detail::as_vector(y);
    const Eigen::VectorXd qt = detail::as_vector(q_tilde);
    BaselineFit best;
    bool have = false;
    auto consider = [&](double h, const Eigen::VectorXd& x) {
        const double r = (svd.matrix() * x - qt).norm();
        if (!have || r <= best.residual) {
            have = true;
            best.hyperparameter = h;
            best.solution = detail::as_std(x);
            best.residual = r;
        }
    };
    if (method == BaselineMethod::tikhonov) {
        for (double lam : tikhonov_lambda_grid(svd)) consider(lam, svd.tikhonov(yv, lam));
    } else {
        for (std::size_t k = 0; k < svd.size(); ++k) consider(static_cast<double>(k), svd.tsvd(yv, k));
    }
    return best;
}

inline BaselineFit tune_baseline(const ConvMatrix& conv, std::span<const double> y, std::span<const double> q_tilde,
                                 BaselineMethod method) {
    return tune_baseline(SvdFilter(conv), y, q_tilde, method);
}

}  // namespace lagdeconv
