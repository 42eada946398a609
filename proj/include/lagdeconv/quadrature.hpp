#pragma once

#include <array>
#include <cmath>
#include <limits>

namespace lagdeconv::quadrature {

namespace detail {

// Gauss-Kronrod 7/15 nodes on [-1, 1] (nonnegative half) and weights.
inline constexpr std::array<double, 8> kXk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kWk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
    double value;
    double error;
};

template <class F>
Panel gk15(const F& f, double lo, double hi) {
    const double c = 0.5 * (lo + hi);
    const double h = 0.5 * (hi - lo);
    const double fc = f(c);
    double kronrod = fc * kWk[7];
    double gauss = fc * kWg[3];
    for (int j = 0; j < 7; ++j) {
        const double dx = h * kXk[j];
        const double s = f(c - dx) + f(c + dx);
        kronrod += kWk[j] * s;
        if (j % 2 == 1) gauss += kWg[j / 2] * s;
    }
    return {kronrod * h, std::abs((kronrod - gauss) * h)};
}

template <class F>
double adapt(const F& f, double lo, double hi, double tol, Panel whole, int depth) {
    if (whole.error <= tol || depth <= 0 || hi - lo < 1e-14 * (1.0 + std::abs(lo))) {
        return whole.value;
    }
    const double mid = 0.5 * (lo + hi);
    const Panel left = gk15(f, lo, mid);
    const Panel right = gk15(f, mid, hi);
    return adapt(f, lo, mid, 0.5 * tol, left, depth - 1) +
           adapt(f, mid, hi, 0.5 * tol, right, depth - 1);
}

}  // namespace detail

/// Adaptive Gauss-Kronrod (7/15) integral of f over [lo, hi].
///
/// Bisects until each panel's Kronrod-Gauss difference falls under its share
/// of `abs_tol`. Used for diagnostics and oracles only; the estimator never
/// integrates numerically.
template <class F>
double integrate(const F& f, double lo, double hi, double abs_tol = 1e-12, int max_depth = 40) {
    if (hi == lo) return 0.0;
    if (hi < lo) return -integrate(f, hi, lo, abs_tol, max_depth);
    return detail::adapt(f, lo, hi, abs_tol, detail::gk15(f, lo, hi), max_depth);
}

/// Sum of adaptive integrals over `pieces` equal sub-intervals; helps with
/// oscillatory integrands on long ranges.
template <class F>
double integrate_pieces(const F& f, double lo, double hi, int pieces, double abs_tol = 1e-12) {
    double total = 0.0;
    const double w = (hi - lo) / pieces;
    for (int p = 0; p < pieces; ++p) {
        const double a = lo + p * w;
        const double b = (p + 1 == pieces) ? hi : a + w;
        total += integrate(f, a, b, abs_tol / pieces);
    }
    return total;
}

}  // namespace lagdeconv::quadrature
