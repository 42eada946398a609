#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <numbers>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "lagdeconv/coeff_vector.hpp"
#include "lagdeconv/error.hpp"

namespace lagdeconv {

/// Lower-triangular Toeplitz operator held by its first column b_0..b_{m-1}:
/// entry (i, j) is b_{i-j} for i >= j and zero above the diagonal.
class ToeplitzLT {
public:
    explicit ToeplitzLT(std::vector<double> first_col) : col_(std::move(first_col)) {
        if (col_.empty()) throw InvalidArgument("ToeplitzLT: first column must be nonempty");
    }

    static ToeplitzLT identity(std::size_t m) {
        std::vector<double> c(m, 0.0);
        if (m > 0) c[0] = 1.0;
        return ToeplitzLT(std::move(c));
    }

    std::size_t size() const noexcept { return col_.size(); }
    std::span<const double> first_col() const noexcept { return col_; }
    double operator()(std::size_t i, std::size_t j) const noexcept { return i >= j ? col_[i - j] : 0.0; }

    /// Leading m x m block; itself lower-triangular Toeplitz.
    ToeplitzLT truncated(std::size_t m) const {
        if (m < 1 || m > col_.size()) throw InvalidArgument("ToeplitzLT::truncated: bad size");
        return ToeplitzLT({col_.begin(), col_.begin() + static_cast<std::ptrdiff_t>(m)});
    }

    std::vector<double> apply(std::span<const double> x) const {
        if (x.size() != col_.size()) throw InvalidArgument("ToeplitzLT::apply: size mismatch");
        std::vector<double> y(col_.size(), 0.0);
        for (std::size_t i = 0; i < col_.size(); ++i) {
            double s = 0.0;
            for (std::size_t j = 0; j <= i; ++j) s += col_[i - j] * x[j];
            y[i] = s;
        }
        return y;
    }

    /// Dense copy, for diagnostics and test oracles.
    Eigen::MatrixXd dense() const {
        const auto m = static_cast<Eigen::Index>(col_.size());
        Eigen::MatrixXd out = Eigen::MatrixXd::Zero(m, m);
        for (Eigen::Index i = 0; i < m; ++i)
            for (Eigen::Index j = 0; j <= i; ++j) out(i, j) = col_[static_cast<std::size_t>(i - j)];
        return out;
    }

private:
    std::vector<double> col_;
};

/// Product of two lower-triangular Toeplitz operators of equal size. The
/// first column of the product is the truncated polynomial product.
inline ToeplitzLT multiply(const ToeplitzLT& lhs, const ToeplitzLT& rhs) {
    if (lhs.size() != rhs.size()) throw InvalidArgument("multiply: size mismatch");
    const auto b = lhs.first_col();
    const auto d = rhs.first_col();
    std::vector<double> col(b.size(), 0.0);
    for (std::size_t k = 0; k < col.size(); ++k)
        for (std::size_t j = 0; j <= k; ++j) col[k] += b[j] * d[k - j];
    return ToeplitzLT(std::move(col));
}

/// Default |b_0| below which an operator is declared singular.
inline constexpr double kSingularTolerance = 1e-13;

/// G_m from kernel coefficients: b_0 = g^(0)/sqrt(2a), b_k = (g^(k) - g^(k-1))/sqrt(2a).
inline ToeplitzLT from_kernel_coeffs(const CoeffVector& g_coeffs, double scale) {
    if (!g_coeffs.same_scale(scale)) {
        throw InvalidArgument("from_kernel_coeffs: coefficient scale " + std::to_string(g_coeffs.scale()) +
                              " does not match operator scale " + std::to_string(scale));
    }
    const double inv_norm = 1.0 / std::sqrt(2.0 * scale);
    std::vector<double> col(g_coeffs.size());
    col[0] = g_coeffs[0] * inv_norm;
    for (std::size_t k = 1; k < col.size(); ++k) col[k] = (g_coeffs[k] - g_coeffs[k - 1]) * inv_norm;
    return ToeplitzLT(std::move(col));
}

/// Forward substitution for op * x = rhs. Only the leading rhs.size() block of
/// `op` is used, which is exactly the truncated operator.
inline std::vector<double> solve_lower(const ToeplitzLT& op, std::span<const double> rhs,
                                       double singular_tol = kSingularTolerance) {
    if (rhs.size() > op.size() || rhs.empty()) throw InvalidArgument("solve_lower: size mismatch");
    const auto b = op.first_col();
    if (!(std::abs(b[0]) >= singular_tol)) {
        throw SingularOperator("solve_lower: |b_0| = " + std::to_string(std::abs(b[0])) +
                               " is below the singularity tolerance");
    }
    std::vector<double> x(rhs.size());
    for (std::size_t i = 0; i < rhs.size(); ++i) {
        double s = rhs[i];
        for (std::size_t j = 0; j < i; ++j) s -= b[i - j] * x[j];
        x[i] = s / b[0];
    }
    return x;
}

/// Solves op * X = rhs column by column (rhs has op.size() rows, or fewer to
/// use the truncated operator).
inline Eigen::MatrixXd solve_lower(const ToeplitzLT& op, const Eigen::MatrixXd& rhs,
                                   double singular_tol = kSingularTolerance) {
    const auto m = rhs.rows();
    if (m < 1 || static_cast<std::size_t>(m) > op.size()) throw InvalidArgument("solve_lower: size mismatch");
    const auto b = op.first_col();
    if (!(std::abs(b[0]) >= singular_tol)) {
        throw SingularOperator("solve_lower: |b_0| = " + std::to_string(std::abs(b[0])) +
                               " is below the singularity tolerance");
    }
    Eigen::MatrixXd x(m, rhs.cols());
    for (Eigen::Index i = 0; i < m; ++i) {
        Eigen::RowVectorXd s = rhs.row(i);
        for (Eigen::Index j = 0; j < i; ++j) s -= b[static_cast<std::size_t>(i - j)] * x.row(j);
        x.row(i) = s / b[0];
    }
    return x;
}

/// Whether [op^{-1} rhs]_m equals op_m^{-1} [rhs]_m within `tol` (relative to
/// the magnitude of the full solution).
inline bool nesting_check(const ToeplitzLT& op, std::size_t m, std::span<const double> rhs, double tol = 1e-10) {
    if (m < 1 || m > op.size()) throw InvalidArgument("nesting_check: m out of range");
    const auto full = solve_lower(op, rhs);
    const auto part = solve_lower(op.truncated(m), rhs.first(m));
    double scale = 1.0;
    for (std::size_t i = 0; i < m; ++i) scale = std::max(scale, std::abs(full[i]));
    for (std::size_t i = 0; i < m; ++i) {
        if (std::abs(full[i] - part[i]) > tol * scale) return false;
    }
    return true;
}

/// Symbol b(e^{i theta}) = sum_k b_k e^{ik theta} of a truncated kernel
/// operator, optionally next to G(a(1+z)/(1-z)).
struct SymbolDiagnostics {
    std::vector<double> theta_grid;
    std::vector<std::complex<double>> symbol_values;      ///< from the normalized first column
    std::vector<std::complex<double>> raw_symbol_values;  ///< normalized values times sqrt(2a)
    std::optional<std::vector<std::complex<double>>> mapped_laplace;
    std::optional<double> growth_exponent;
};

using LaplaceTransform = std::function<std::complex<double>(std::complex<double>)>;

/// Maps the unit circle point e^{i theta} to s = a(1+z)/(1-z).
inline std::complex<double> circle_to_laplace(double theta, double scale) {
    const std::complex<double> z = std::polar(1.0, theta);
    return scale * (1.0 + z) / (1.0 - z);
}

inline SymbolDiagnostics symbol_diagnostics(std::span<const double> g_coeffs, const LaplaceTransform& laplace,
                                            double scale, std::span<const double> theta_grid) {
    if (!(scale > 0.0)) throw InvalidArgument("symbol_diagnostics: scale must be positive");
    constexpr double two_pi = 2.0 * std::numbers::pi;
    for (double th : theta_grid) {
        const double r = std::fmod(std::fmod(th, two_pi) + two_pi, two_pi);
        if (std::min(r, two_pi - r) < 1e-3) {
            throw InvalidArgument("symbol_diagnostics: theta too close to 0 where the map is singular");
        }
    }
    std::vector<double> col;
    if (!g_coeffs.empty()) {
        const auto op = from_kernel_coeffs(CoeffVector({g_coeffs.begin(), g_coeffs.end()}, scale), scale);
        col.assign(op.first_col().begin(), op.first_col().end());
    }
    SymbolDiagnostics out;
    out.theta_grid.assign(theta_grid.begin(), theta_grid.end());
    const double norm = std::sqrt(2.0 * scale);
    for (double th : theta_grid) {
        std::complex<double> s{0.0, 0.0};
        const std::complex<double> z = std::polar(1.0, th);
        // Horner from the top coefficient.
        for (auto it = col.rbegin(); it != col.rend(); ++it) s = s * z + *it;
        out.symbol_values.push_back(s);
        out.raw_symbol_values.push_back(s * norm);
    }
    if (laplace) {
        std::vector<std::complex<double>> mapped;
        mapped.reserve(theta_grid.size());
        for (double th : theta_grid) mapped.push_back(laplace(circle_to_laplace(th, scale)));
        out.mapped_laplace = std::move(mapped);
    }
    return out;
}

inline SymbolDiagnostics symbol_diagnostics(const CoeffVector& g_coeffs, const LaplaceTransform& laplace,
                                            double scale, std::span<const double> theta_grid) {
    if (!g_coeffs.same_scale(scale)) throw InvalidArgument("symbol_diagnostics: scale mismatch");
    return symbol_diagnostics(g_coeffs.values(), laplace, scale, theta_grid);
}

/// Least-squares slope of log(v) against log(m).
inline double growth_exponent(std::span<const std::pair<double, double>> v_squared_by_m) {
    if (v_squared_by_m.size() < 5) throw InvalidArgument("growth_exponent: need at least 5 (m, v^2) pairs");
    std::vector<double> xs, ys;
    for (const auto& [m, v] : v_squared_by_m) {
        if (!(m > 0.0) || !(v > 0.0)) throw InvalidArgument("growth_exponent: m and v^2 must be positive");
        xs.push_back(std::log(m));
        ys.push_back(std::log(v));
    }
    const double n = static_cast<double>(xs.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    if (!(sxx > 0.0)) throw InvalidArgument("growth_exponent: need at least two distinct m");
    return sxy / sxx;
}

}  // namespace lagdeconv
