#pragma once

// Independent reference computations for the unit tests: extended precision
// arithmetic and Boost quadrature, never the library's own routines.

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/binomial.hpp>
#include <boost/math/special_functions/factorials.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <limits>

namespace oracle {

using big = boost::multiprecision::cpp_bin_float_50;

/// L_k(x) = sum_j (-1)^j C(k, j) x^j / j! in 50-digit arithmetic.
inline big laguerre_sum(int k, const big& x) {
    big s = 0, term = 1;  // term = C(k, j) x^j / j! with sign
    for (int j = 0; j <= k; ++j) {
        if (j > 0) term *= -big(k - j + 1) * x / big(j) / big(j);
        s += term;
    }
    return s;
}

/// phi_k(t) = sqrt(2a) e^{-at} L_k(2at) by the explicit sum.
inline double laguerre_fn(int k, double a, double t) {
    const big ab = a, tb = t;
    return static_cast<double>(sqrt(2 * ab) * exp(-ab * tb) * laguerre_sum(k, 2 * ab * tb));
}

/// Adaptive Gauss-Kronrod 61-point integral.
inline double integrate(const std::function<double(double)>& f, double lo, double hi, double tol = 1e-13) {
    if (hi <= lo) return 0.0;
    double err = 0.0;
    return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, lo, hi, 15, tol, &err);
}

/// Same integral split into `pieces` equal panels.
inline double integrate_panels(const std::function<double(double)>& f, double lo, double hi, int pieces,
                               double tol = 1e-13) {
    double s = 0.0;
    const double h = (hi - lo) / pieces;
    for (int i = 0; i < pieces; ++i) s += integrate(f, lo + i * h, lo + (i + 1) * h, tol);
    return s;
}

/// k-th Laguerre coefficient of e^{-p t} at scale a, from
/// int_0^inf e^{-P t} L_k(c t) dt = (P - c)^k / P^{k+1} with P = p + a, c = 2a.
inline double exp_kernel_coeff(int k, double p, double a) {
    return std::sqrt(2 * a) * std::pow(p - a, k) / std::pow(p + a, k + 1);
}

/// Dense lower-triangular Toeplitz matrix from a first column.
inline Eigen::MatrixXd toeplitz_dense(const Eigen::VectorXd& col) {
    const auto m = col.size();
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(m, m);
    for (Eigen::Index i = 0; i < m; ++i)
        for (Eigen::Index j = 0; j <= i; ++j) out(i, j) = col(i - j);
    return out;
}

}  // namespace oracle
