#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "lagdeconv/coeffs.hpp"
#include "lagdeconv/simbench.hpp"
#include "oracles.hpp"

using namespace lagdeconv;

namespace {

const SampleGrid kGrid = SampleGrid::equispaced(100, 10.0);

std::vector<double> apply_design(const LaguerreContext& ctx, const std::vector<double>& c) {
    const Eigen::Map<const Eigen::VectorXd> cv(c.data(), static_cast<Eigen::Index>(c.size()));
    const Eigen::VectorXd y = ctx.design() * cv;
    return {y.data(), y.data() + y.size()};
}

}  // namespace

TEST(ProjectSamples, ExactRecoveryInColumnSpace) {
    std::mt19937_64 rng(1);
    std::normal_distribution<double> nd;
    for (auto [a, M] : {std::pair{1.0, 10}, std::pair{2.5, 25}, std::pair{0.5, 8}}) {
        const auto ctx = build_context(kGrid, a, M);
        std::vector<double> c(M);
        for (double& v : c) v = nd(rng);
        const auto got = project_samples(ctx, apply_design(ctx, c));
        ASSERT_EQ(got.size(), static_cast<std::size_t>(M));
        EXPECT_DOUBLE_EQ(got.scale(), a);
        for (int k = 0; k < M; ++k) EXPECT_NEAR(got[k], c[k], 1e-9) << "a=" << a << " k=" << k;
    }
}

TEST(ProjectSamples, ZeroSamplesGiveZeroCoefficients) {
    const auto got = project_samples(build_context(kGrid, 1.0, 12), std::vector<double>(100, 0.0));
    for (double v : got.values()) EXPECT_EQ(v, 0.0);
}

TEST(ProjectSamples, ExponentialKernelMatchesClosedForm) {
    // At a=2.5 the closed form is g^(k) = sqrt(5) 2.5^k / 7.5^{k+1}.
    const double a = 2.5;
    const auto g = kernel_by_id("g2").samples(kGrid);
    const auto c = project_samples(build_context(kGrid, a, 25), g);
    for (int k = 0; k < 25; ++k) {
        const double ref = std::sqrt(5.0) * std::pow(2.5, k) / std::pow(7.5, k + 1);
        EXPECT_NEAR(ref, oracle::exp_kernel_coeff(k, 5.0, a), 1e-15);
        EXPECT_NEAR(c[k], ref, 2e-2) << k;
    }
}

TEST(ProjectSamples, RankDeficientDesignNamesOrder) {
    const SampleGrid dup({0.0, 0.0, 1.0}, 1.0);
    const auto ctx = build_context(dup, 1.0, 3);
    try {
        project_samples(ctx, std::vector<double>{1.0, 1.0, 2.0});
        FAIL() << "expected RankDeficient";
    } catch (const RankDeficient& e) {
        EXPECT_EQ(e.order(), 2u);
        EXPECT_NE(std::string(e.what()).find("order 2"), std::string::npos);
    }
}

TEST(ProjectSamples, LengthMismatchRejected) {
    EXPECT_THROW(project_samples(build_context(kGrid, 1.0, 5), std::vector<double>(99, 0.0)), InvalidArgument);
}

TEST(SelectMaxOrder, TwoPointGridCapsAtTwo) {
    const auto grid = SampleGrid::equispaced(2, 10.0);
    const auto g = kernel_by_id("g2").samples(grid);
    const auto sel = select_max_order(grid, 0.5, g, 25);
    EXPECT_GE(sel.max_order, 1u);
    EXPECT_LE(sel.max_order, 2u);
}

TEST(SelectMaxOrder, SettingOneGridReachesCapWithEta110) {
    const auto g = kernel_by_id("g2").samples(kGrid);
    const auto sel = select_max_order(kGrid, 2.5, g, 25, 1e12);
    EXPECT_EQ(sel.max_order, 25u);
    EXPECT_NEAR(sel.eta, 1.10, 5e-3);
    EXPECT_LT(sel.design_condition, 1e12);
    EXPECT_LT(sel.kernel_condition, 1e12);
}

TEST(SelectMaxOrder, CtGridEta190) {
    const auto raw = synthetic_ct_kernel();
    const SampleGrid grid(rescale_times(raw.times), 10.0);
    const auto sel = select_max_order(grid, 3.5, raw.values, 25, 1e12);
    EXPECT_EQ(sel.max_order, 25u);
    EXPECT_NEAR(sel.eta, 1.90, 5e-3);
}

TEST(SelectMaxOrder, EtaFormula) {
    EXPECT_NEAR(implied_eta(25, 100), 3.0 * std::log(25.0) / std::log(100.0) - 1.0, 1e-15);
    EXPECT_NEAR(implied_eta(10, 1000), 0.0, 1e-12);
}

TEST(SelectMaxOrder, MonotoneInThreshold) {
    // A looser threshold admits at least as large an order.
    for (const char* id : {"g1", "g2", "g3", "g4", "g5"}) {
        const auto g = kernel_by_id(id).samples(kGrid);
        for (double a : {0.3, 1.0, 3.0}) {
            std::size_t prev = 0;
            for (double thr : {1e3, 1e4, 1e6, 1e8, 1e10, 1e12, 1e14}) {
                std::size_t m = 0;
                try {
                    m = select_max_order(kGrid, a, g, 25, thr).max_order;
                } catch (const RankDeficient&) {
                    m = 0;
                }
                EXPECT_GE(m, prev) << id << " a=" << a << " thr=" << thr;
                prev = m;
            }
        }
    }
}

TEST(SelectMaxOrder, ZeroKernelHasNoValidOrder) {
    EXPECT_THROW(select_max_order(kGrid, 1.0, std::vector<double>(100, 0.0)), RankDeficient);
}

TEST(Reconstruct, ConstantCoefficientAtOrigin) {
    EXPECT_NEAR(reconstruct(CoeffVector({1.0}, 0.5), 0.0), 1.0, 1e-15);
}

TEST(Reconstruct, ZeroCoefficientsGiveZeroFunction) {
    const CoeffVector z(std::vector<double>(10, 0.0), 1.3);
    for (double t : {0.0, 0.5, 3.0, 40.0}) EXPECT_EQ(reconstruct(z, t), 0.0);
}

TEST(Reconstruct, NegativeTimeRejected) {
    EXPECT_THROW(reconstruct(CoeffVector({1.0}, 1.0), -0.1), InvalidArgument);
}

TEST(Reconstruct, SmoothFunctionApproximatedWell) {
    const auto f1 = test_function("f1");
    std::vector<double> y;
    for (double t : kGrid.times()) y.push_back(f1(t));
    const auto c = project_samples(build_context(kGrid, 2.5, 25), y);
    const double err = oracle::integrate_panels(
        [&](double t) {
            const double d = reconstruct(c, t) - f1(t);
            return d * d;
        },
        0.0, 10.0, 20, 1e-8);
    EXPECT_LT(err, 1e-4);
}

TEST(ProjectSamples, Idempotent) {
    std::mt19937_64 rng(2);
    std::normal_distribution<double> nd;
    std::vector<double> v(100);
    for (double& x : v) x = nd(rng);
    for (auto [a, M] : {std::pair{1.0, 12}, std::pair{2.5, 25}}) {
        const auto ctx = build_context(kGrid, a, M);
        const auto c1 = project_samples(ctx, v);
        const auto c2 = project_samples(ctx, reconstruct(c1, kGrid.times()));
        for (int k = 0; k < M; ++k) EXPECT_NEAR(c1[k], c2[k], 1e-10);
    }
}

TEST(ProjectSamples, UnbiasedUnderNoise) {
    const auto ctx = build_context(kGrid, 1.0, 10);
    const LeastSquaresProjector proj(ctx);
    const auto g = kernel_by_id("g3").samples(kGrid);
    const auto truth = proj.project(g);
    const std::size_t draws = 10000;
    const double sigma = 0.1;
    std::mt19937_64 rng(3);
    std::normal_distribution<double> nd;
    std::vector<double> sum(10, 0.0), sumsq(10, 0.0), y(100);
    for (std::size_t d = 0; d < draws; ++d) {
        for (std::size_t i = 0; i < 100; ++i) y[i] = g[i] + sigma * nd(rng);
        const auto c = proj.project(y);
        for (std::size_t k = 0; k < 10; ++k) {
            sum[k] += c[k];
            sumsq[k] += c[k] * c[k];
        }
    }
    for (std::size_t k = 0; k < 10; ++k) {
        const double mean = sum[k] / draws;
        const double var = (sumsq[k] - draws * mean * mean) / (draws - 1);
        const double se = std::sqrt(var / draws);
        EXPECT_LE(std::abs(mean - truth[k]), 4.0 * se) << k;
    }
}
