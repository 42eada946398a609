#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

#include "lagdeconv/coeffs.hpp"
#include "lagdeconv/simbench.hpp"
#include "lagdeconv/toeplitz.hpp"
#include "oracles.hpp"

using namespace lagdeconv;

namespace {

std::vector<double> g2_closed_coeffs(double a, int m) {
    std::vector<double> c(m);
    for (int k = 0; k < m; ++k) c[k] = oracle::exp_kernel_coeff(k, 5.0, a);
    return c;
}

std::vector<double> random_vector(std::size_t n, std::mt19937_64& rng) {
    std::normal_distribution<double> nd;
    std::vector<double> v(n);
    for (double& x : v) x = nd(rng);
    return v;
}

}  // namespace

TEST(FromKernelCoeffs, DifferencesOfUnitSpike) {
    for (double a : {0.3, 0.5, 2.0}) {
        const auto op = from_kernel_coeffs(CoeffVector({std::sqrt(2 * a), 0.0, 0.0}, a), a);
        ASSERT_EQ(op.size(), 3u);
        EXPECT_NEAR(op.first_col()[0], 1.0, 1e-15);
        EXPECT_NEAR(op.first_col()[1], -1.0, 1e-15);
        EXPECT_EQ(op.first_col()[2], 0.0);
    }
}

TEST(FromKernelCoeffs, SingleCoefficient) {
    const auto op = from_kernel_coeffs(CoeffVector({0.8}, 2.0), 2.0);
    ASSERT_EQ(op.size(), 1u);
    EXPECT_NEAR(op.first_col()[0], 0.4, 1e-15);
}

TEST(FromKernelCoeffs, ScaleMismatchRejected) {
    EXPECT_THROW(from_kernel_coeffs(CoeffVector({1.0, 2.0}, 0.5), 0.6), InvalidArgument);
}

TEST(FromKernelCoeffs, ExponentialKernelClosedFormAgreesWithQuadrature) {
    // g2 = e^{-5t} at a = 0.5: g^(k) = 4.5^k / 5.5^{k+1}.
    const double a = 0.5;
    for (int k = 0; k < 25; ++k) {
        const double closed = std::pow(4.5, k) / std::pow(5.5, k + 1);
        const double quad = oracle::integrate_panels(
            [&](double t) { return std::exp(-5.0 * t) * oracle::laguerre_fn(k, a, t); }, 0.0, 40.0, 40);
        EXPECT_NEAR(closed, quad, 1e-10) << k;
    }
    const auto gc = g2_closed_coeffs(a, 25);
    const auto op = from_kernel_coeffs(CoeffVector(gc, a), a);
    EXPECT_NEAR(op.first_col()[0], 1.0 / 5.5, 1e-12);
    for (int k = 1; k < 25; ++k) {
        const double ref = std::pow(4.5, k) / std::pow(5.5, k + 1) - std::pow(4.5, k - 1) / std::pow(5.5, k);
        EXPECT_NEAR(op.first_col()[k], ref, 1e-9) << k;
    }
}

TEST(SolveLower, IdentityReturnsRhs) {
    const auto id = ToeplitzLT::identity(5);
    const std::vector<double> rhs{1.0, -2.0, 3.5, 0.0, 7.0};
    EXPECT_EQ(solve_lower(id, rhs), rhs);
}

TEST(SolveLower, TwoByTwoByHand) {
    const ToeplitzLT op({1.0, -1.0});
    const auto x = solve_lower(op, std::vector<double>{1.0, 0.0});
    EXPECT_NEAR(x[0], 1.0, 1e-15);
    EXPECT_NEAR(x[1], 1.0, 1e-15);
}

TEST(SolveLower, RandomInstanceMatchesDenseLu) {
    std::mt19937_64 rng(7);
    auto col = random_vector(10, rng);
    col[0] = 3.0;  // keep it well conditioned
    for (std::size_t k = 1; k < col.size(); ++k) col[k] *= 0.3;
    const ToeplitzLT op(col);
    const auto rhs = random_vector(10, rng);
    const auto x = solve_lower(op, rhs);
    const Eigen::MatrixXd dense = oracle::toeplitz_dense(Eigen::Map<const Eigen::VectorXd>(col.data(), 10));
    const Eigen::VectorXd ref = dense.partialPivLu().solve(Eigen::Map<const Eigen::VectorXd>(rhs.data(), 10));
    for (int i = 0; i < 10; ++i) EXPECT_NEAR(x[i], ref(i), 1e-10);
}

TEST(SolveLower, SingularOperatorRejected) {
    EXPECT_THROW(solve_lower(ToeplitzLT({0.0, 1.0}), std::vector<double>{1.0, 1.0}), SingularOperator);
    EXPECT_THROW(solve_lower(ToeplitzLT({1e-14, 1.0}), std::vector<double>{1.0, 1.0}), SingularOperator);
    EXPECT_NO_THROW(solve_lower(ToeplitzLT({1e-12, 1.0}), std::vector<double>{1.0, 1.0}));
}

TEST(SolveLower, ResidualSmallForModerateConditioning) {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t m = 2 + trial % 20;
        auto col = random_vector(m, rng);
        col[0] = 2.0 + std::abs(col[0]);
        for (std::size_t k = 1; k < m; ++k) col[k] *= 0.5;
        const ToeplitzLT op(col);
        const Eigen::MatrixXd dense = op.dense();
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(dense);
        const double cond = svd.singularValues()(0) / svd.singularValues()(m - 1);
        if (cond > 1e8) continue;
        const auto rhs = random_vector(m, rng);
        const auto x = solve_lower(op, rhs);
        const auto back = op.apply(x);
        double num = 0, den = 0;
        for (std::size_t i = 0; i < m; ++i) {
            num += (back[i] - rhs[i]) * (back[i] - rhs[i]);
            den += rhs[i] * rhs[i];
        }
        EXPECT_LE(std::sqrt(num), 1e-10 * std::sqrt(den)) << "trial " << trial << " cond " << cond;
    }
}

TEST(NestingCheck, FullOrderIsReflexive) {
    const ToeplitzLT op({2.0, 0.5, -0.1});
    EXPECT_TRUE(nesting_check(op, 3, std::vector<double>{1.0, 2.0, 3.0}));
}

TEST(NestingCheck, IdentityAnyOrder) {
    const auto id = ToeplitzLT::identity(6);
    const std::vector<double> rhs{1, 2, 3, 4, 5, 6};
    for (std::size_t m = 1; m <= 6; ++m) EXPECT_TRUE(nesting_check(id, m, rhs));
}

TEST(NestingCheck, ExponentialKernelOrder7Of25) {
    const double a = 0.5;
    const auto op = from_kernel_coeffs(CoeffVector(g2_closed_coeffs(a, 25), a), a);
    std::mt19937_64 rng(3);
    const auto rhs = random_vector(25, rng);
    EXPECT_TRUE(nesting_check(op, 7, rhs));
    // Direct comparison of both sides.
    const auto full = solve_lower(op, rhs);
    const auto part = solve_lower(op.truncated(7), std::span<const double>(rhs).first(7));
    for (int i = 0; i < 7; ++i) EXPECT_NEAR(full[i], part[i], 1e-12);
}

TEST(NestingCheck, AllOrdersOnBenchmarkKernels) {
    std::mt19937_64 rng(5);
    const auto grid = SampleGrid::equispaced(100, 10.0);
    for (const char* id : {"g1", "g2", "g3", "g4", "g5"}) {
        const auto g = kernel_by_id(id).samples(grid);
        for (double a : {0.5, 1.7616, 3.85}) {
            const auto sel = select_max_order(grid, a, g);
            const auto op = from_kernel_coeffs(project_samples(build_context(grid, a, sel.max_order), g), a);
            const auto rhs = random_vector(sel.max_order, rng);
            for (std::size_t m = 1; m <= sel.max_order; ++m) EXPECT_TRUE(nesting_check(op, m, rhs)) << id << " a=" << a << " m=" << m;
        }
    }
    for (const auto& raw : {synthetic_ct_kernel(), synthetic_mri_kernel()}) {
        const SampleGrid g(rescale_times(raw.times), 10.0);
        for (double a : {0.5, 1.7616}) {
            const auto sel = select_max_order(g, a, raw.values);
            const auto op = from_kernel_coeffs(project_samples(build_context(g, a, sel.max_order), raw.values), a);
            const auto rhs = random_vector(sel.max_order, rng);
            for (std::size_t m = 1; m <= sel.max_order; ++m) EXPECT_TRUE(nesting_check(op, m, rhs)) << raw.id << " m=" << m;
        }
    }
}

TEST(ToeplitzProduct, SymbolOfProductIsProductOfSymbols) {
    std::mt19937_64 rng(17);
    std::uniform_int_distribution<int> deg(0, 10);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t m = 11;
        auto b = random_vector(m, rng), d = random_vector(m, rng);
        const int db = deg(rng), dd = deg(rng);
        for (std::size_t k = db + 1; k < m; ++k) b[k] = 0.0;
        for (std::size_t k = dd + 1; k < m; ++k) d[k] = 0.0;
        const ToeplitzLT B(b), D(d);
        const Eigen::MatrixXd ref = B.dense() * D.dense();
        const Eigen::MatrixXd got = multiply(B, D).dense();
        EXPECT_LE((ref - got).cwiseAbs().maxCoeff(), 1e-10) << trial;
    }
}

TEST(SymbolDiagnostics, ExponentialKernelAtPi) {
    const double a = 0.5;
    const std::vector<double> theta{std::numbers::pi};
    const auto g = kernel_by_id("g2");
    const auto d = symbol_diagnostics(CoeffVector(g2_closed_coeffs(a, 25), a), g.laplace, a, theta);
    ASSERT_TRUE(d.mapped_laplace.has_value());
    EXPECT_NEAR((*d.mapped_laplace)[0].real(), 0.2, 1e-12);
    EXPECT_NEAR((*d.mapped_laplace)[0].imag(), 0.0, 1e-12);
    // Tail of the geometric series (4.5/5.5)^k beyond 25 terms.
    EXPECT_NEAR(d.symbol_values[0].real(), 0.2, 1e-3);
    EXPECT_NEAR(std::abs(d.raw_symbol_values[0] - d.symbol_values[0] * std::sqrt(2 * a)), 0.0, 1e-15);
}

TEST(SymbolDiagnostics, EmptyCoefficientsGiveZeroSymbol) {
    const std::vector<double> theta{0.5, 1.0, 3.0};
    const auto d = symbol_diagnostics(std::span<const double>{}, nullptr, 1.0, theta);
    for (const auto& v : d.symbol_values) EXPECT_EQ(v, std::complex<double>(0.0, 0.0));
    EXPECT_FALSE(d.mapped_laplace.has_value());
}

TEST(SymbolDiagnostics, ThetaTooCloseToZeroRejected) {
    const std::vector<double> bad{5e-4};
    EXPECT_THROW(symbol_diagnostics(std::vector<double>{1.0}, nullptr, 1.0, bad), InvalidArgument);
    const std::vector<double> wrap{2 * std::numbers::pi - 1e-4};
    EXPECT_THROW(symbol_diagnostics(std::vector<double>{1.0}, nullptr, 1.0, wrap), InvalidArgument);
}

TEST(SymbolDiagnostics, RationalKernelPartialSumsConverge) {
    // g3 = e^{-t}(2t+1), G(s) = (s+3)/(s+1)^2, and G(0) = 3 at theta = pi.
    const double a = 0.5;
    const auto g = kernel_by_id("g3");
    auto coeff = [&](int k) {
        // int t e^{-Pt} L_k(ct) dt = -d/dP [(P-c)^k / P^{k+1}]
        const double P = 1.0 + a, c = 2 * a;
        const double lin = (k + 1) * std::pow(P - c, k) / std::pow(P, k + 2) -
                           (k > 0 ? k * std::pow(P - c, k - 1) / std::pow(P, k + 1) : 0.0);
        return std::sqrt(2 * a) * (2.0 * lin + std::pow(P - c, k) / std::pow(P, k + 1));
    };
    for (int k = 0; k < 6; ++k) {
        const double quad = oracle::integrate_panels(
            [&](double t) { return g(t) * oracle::laguerre_fn(k, a, t); }, 0.0, 80.0, 40);
        ASSERT_NEAR(coeff(k), quad, 1e-10) << k;
    }
    const std::vector<double> theta{std::numbers::pi};
    double prev_err = 1e300;
    for (int M : {3, 6, 12, 25, 40}) {
        std::vector<double> c(M);
        for (int k = 0; k < M; ++k) c[k] = coeff(k);
        const auto d = symbol_diagnostics(CoeffVector(c, a), g.laplace, a, theta);
        EXPECT_NEAR((*d.mapped_laplace)[0].real(), 3.0, 1e-12);
        const double err = std::abs(d.symbol_values[0] - 3.0);
        EXPECT_LT(err, prev_err) << M;
        prev_err = err;
    }
    // Coefficients decay like 3^{-k} (pole of the mapped transform at z = 3).
    EXPECT_LT(prev_err, 1e-12);
}

TEST(SymbolDiagnostics, NormalizedSymbolMatchesMappedLaplaceAroundCircle) {
    const double a = 1.5;
    std::vector<double> c(60);
    for (int k = 0; k < 60; ++k) c[k] = oracle::exp_kernel_coeff(k, 5.0, a);
    std::vector<double> theta;
    for (int i = 1; i < 32; ++i) theta.push_back(2 * std::numbers::pi * i / 32.0);
    const auto d = symbol_diagnostics(CoeffVector(c, a), kernel_by_id("g2").laplace, a, theta);
    for (std::size_t i = 0; i < theta.size(); ++i)
        EXPECT_LT(std::abs(d.symbol_values[i] - (*d.mapped_laplace)[i]), 1e-8) << theta[i];
}

TEST(GrowthExponent, ExactPowerLaws) {
    std::vector<std::pair<double, double>> sq, quart;
    for (int m = 1; m <= 8; ++m) {
        sq.emplace_back(m, double(m) * m);
        quart.emplace_back(m, 3.7 * std::pow(m, 4));
    }
    EXPECT_NEAR(growth_exponent(sq), 2.0, 1e-12);
    EXPECT_NEAR(growth_exponent(quart), 4.0, 1e-12);
}

TEST(GrowthExponent, NeedsFivePairs) {
    std::vector<std::pair<double, double>> few{{1, 1}, {2, 4}, {3, 9}, {4, 16}};
    EXPECT_THROW(growth_exponent(few), InvalidArgument);
    std::vector<std::pair<double, double>> same{{2, 1}, {2, 4}, {2, 9}, {2, 16}, {2, 3}};
    EXPECT_THROW(growth_exponent(same), InvalidArgument);
}
