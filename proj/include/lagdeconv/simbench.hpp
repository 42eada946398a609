#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "lagdeconv/baselines.hpp"
#include "lagdeconv/coeffs.hpp"
#include "lagdeconv/convolution.hpp"
#include "lagdeconv/deconvolve.hpp"
#include "lagdeconv/error.hpp"
#include "lagdeconv/grid.hpp"
#include "lagdeconv/parallel.hpp"
#include "lagdeconv/stats.hpp"
#include "lagdeconv/toeplitz.hpp"

namespace lagdeconv {

// ---------------------------------------------------------------------------
// Special functions

/// Regularized upper incomplete gamma Q(a, x): series for x < a + 1,
/// Lentz continued fraction otherwise.
inline double regularized_gamma_q(double a, double x) {
    if (!(a > 0.0)) throw InvalidArgument("regularized_gamma_q: shape must be positive");
    if (x <= 0.0) return 1.0;
    const double log_pre = -x + a * std::log(x) - std::lgamma(a);
    constexpr double eps = 1e-16;
    if (x < a + 1.0) {
        double ap = a, del = 1.0 / a, sum = del;
        for (int it = 0; it < 10000; ++it) {
            ap += 1.0;
            del *= x / ap;
            sum += del;
            if (std::abs(del) < std::abs(sum) * eps) break;
        }
        return std::max(0.0, 1.0 - sum * std::exp(log_pre));
    }
    constexpr double tiny = 1e-300;
    double b = x + 1.0 - a, c = 1.0 / tiny, d = 1.0 / b, h = d;
    for (int i = 1; i < 10000; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < eps) break;
    }
    return std::min(1.0, std::exp(log_pre) * h);
}

/// Survival function of the Gamma(shape, scale_param) distribution at t.
inline double gamma_sf(double shape, double scale_param, double t) {
    if (!(scale_param > 0.0)) throw InvalidArgument("gamma_sf: scale must be positive");
    if (t < 0.0) throw InvalidArgument("gamma_sf: t must be >= 0");
    return regularized_gamma_q(shape, t / scale_param);
}

/// rho_0..rho_k with prod_j (s - root_j) = sum_j rho_j (s+3)^{k-j}.
inline std::vector<double> g45_coeffs(std::span<const std::complex<double>> roots, std::size_t k) {
    if (roots.size() != k) throw InvalidArgument("g45_coeffs: expected k roots");
    std::vector<std::complex<double>> poly{1.0};  // descending powers of u = s + 3
    for (const auto& r : roots) {
        const std::complex<double> shifted = r + 3.0;
        std::vector<std::complex<double>> next(poly.size() + 1, 0.0);
        for (std::size_t i = 0; i < poly.size(); ++i) {
            next[i] += poly[i];
            next[i + 1] -= shifted * poly[i];
        }
        poly = std::move(next);
    }
    std::vector<double> out;
    for (const auto& c : poly) {
        if (std::abs(c.imag()) > 1e-10) throw InvalidArgument("g45_coeffs: roots are not closed under conjugation");
        out.push_back(c.real());
    }
    return out;
}

// ---------------------------------------------------------------------------
// Test functions and kernels

struct TestFunction {
    std::string id;
    std::function<double(double)> eval;

    double operator()(double t) const { return eval(t); }

    /// beta * f, keeping the id.
    TestFunction scaled(double beta) const {
        auto base = eval;
        return {id, [base, beta](double t) { return beta * base(t); }};
    }
};

inline TestFunction test_function(const std::string& id) {
    if (id == "f1") return {id, [](double t) { return t * t * std::exp(-t); }};
    if (id == "f2") return {id, [](double t) { return gamma_sf(2.0, 2.0, t); }};
    if (id == "f3") return {id, [](double t) { return gamma_sf(3.0, 0.75, t); }};
    if (id == "f4") return {id, [](double t) { return std::exp(-2.0 * t); }};
    throw InvalidArgument("unknown test function '" + id + "' (expected f1, f2, f3 or f4)");
}

struct KernelSpec {
    std::string id;
    std::function<double(double)> closed_form;  ///< empty for sampled kernels
    std::vector<double> sample_times;
    std::vector<double> sample_values;
    LaplaceTransform laplace;
    std::optional<int> r_order;
    double nominal_sigma = 0.0;

    bool sampled() const noexcept { return !closed_form; }

    double operator()(double t) const {
        return sampled() ? interp_linear(sample_times, sample_values, t) : closed_form(t);
    }

    /// Kernel values on the grid. A sampled kernel must live on that grid.
    std::vector<double> samples(const SampleGrid& grid) const {
        if (sampled()) {
            const SampleGrid own(sample_times, std::max(grid.horizon(), sample_times.back()));
            if (!own.matches(grid)) {
                throw InvalidArgument("kernel '" + id + "': grid mismatch at row " +
                                      std::to_string(own.first_mismatch(grid) + 1));
            }
            return sample_values;
        }
        std::vector<double> out(grid.size());
        for (std::size_t i = 0; i < grid.size(); ++i) out[i] = closed_form(grid[i]);
        return out;
    }
};

inline const std::vector<std::complex<double>>& g4_roots() {
    static const std::vector<std::complex<double>> r{{-4.0, 2.5}, {-4.0, -2.5}, {-0.75, 1.5}, {-0.75, -1.5}};
    return r;
}

inline const std::vector<std::complex<double>>& g5_roots() {
    static const std::vector<std::complex<double>> r{{-4.0, 2.5},  {-4.0, -2.5}, {-0.75, 1.5},
                                                     {-0.75, -1.5}, {-2.0, 2.0},  {-2.0, -2.0}};
    return r;
}

namespace detail {
inline KernelSpec g45_kernel(const std::string& id, const std::vector<std::complex<double>>& roots) {
    const auto rho = g45_coeffs(roots, roots.size());
    KernelSpec k;
    k.id = id;
    k.closed_form = [rho](double t) {
        double s = 0.0, tj = 1.0, fact = 2.0;  // (j+2)!
        for (std::size_t j = 0; j < rho.size(); ++j) {
            s += rho[j] * tj / fact;
            tj *= t;
            fact *= static_cast<double>(j + 3);
        }
        return std::exp(-3.0 * t) * t * t * s;
    };
    k.laplace = [rho](std::complex<double> s) {
        const std::complex<double> u = s + 3.0;
        std::complex<double> acc = 0.0, p = u * u * u;
        for (double r : rho) {
            acc += r / p;
            p *= u;
        }
        return acc;
    };
    k.r_order = 3;
    k.nominal_sigma = 0.002;
    return k;
}
}  // namespace detail

/// Closed-form kernels g1..g5.
inline KernelSpec kernel_by_id(const std::string& id) {
    KernelSpec k;
    k.id = id;
    if (id == "g1") {
        k.closed_form = [](double t) { return std::exp(-5.0 * t) * (2.0 * t - std::sin(2.0 * t)); };
        k.laplace = [](std::complex<double> s) {
            const auto u = s + 5.0;
            return 8.0 / (u * u * (u * u + 4.0));
        };
        k.r_order = 4;
        k.nominal_sigma = 0.001;
    } else if (id == "g2") {
        k.closed_form = [](double t) { return std::exp(-5.0 * t); };
        k.laplace = [](std::complex<double> s) { return 1.0 / (s + 5.0); };
        k.r_order = 1;
        k.nominal_sigma = 0.1;
    } else if (id == "g3") {
        k.closed_form = [](double t) { return std::exp(-t) * (2.0 * t + 1.0); };
        k.laplace = [](std::complex<double> s) { return (s + 3.0) / ((s + 1.0) * (s + 1.0)); };
        k.r_order = 1;
        k.nominal_sigma = 0.01;
    } else if (id == "g4") {
        return detail::g45_kernel(id, g4_roots());
    } else if (id == "g5") {
        return detail::g45_kernel(id, g5_roots());
    } else {
        throw InvalidArgument("unknown kernel '" + id + "' (expected g1..g5)");
    }
    return k;
}

/// Kernel known only through samples (times already on the analysis scale).
inline KernelSpec sampled_kernel(std::string id, std::vector<double> times, std::vector<double> values) {
    if (times.size() != values.size() || times.size() < 2) {
        throw InvalidArgument("sampled kernel '" + id + "': need matching time and value columns with >= 2 rows");
    }
    KernelSpec k;
    k.id = std::move(id);
    k.sample_times = std::move(times);
    k.sample_values = std::move(values);
    return k;
}

/// Affine map of times onto [0, horizon] (first time to 0, last to horizon).
inline std::vector<double> rescale_times(std::span<const double> times, double horizon = 10.0) {
    if (times.size() < 2 || !(times.back() > times.front())) {
        throw InvalidArgument("rescale_times: need at least two distinct times");
    }
    std::vector<double> out(times.size());
    const double span = times.back() - times.front();
    for (std::size_t i = 0; i < times.size(); ++i) out[i] = horizon * (times[i] - times.front()) / span;
    out.back() = horizon;
    return out;
}

// Synthetic stand-ins for the DCE arterial input functions. Sum of gamma-variate
// bolus, recirculation bump and slow washout, in raw seconds.
namespace detail {
inline double gamma_variate(double t, double peak, double alpha) {
    if (t <= 0.0) return 0.0;
    const double x = t / peak;
    return std::pow(x, alpha) * std::exp(alpha * (1.0 - x));
}
}  // namespace detail

struct RawKernelSamples {
    std::string id;
    std::vector<double> times;
    std::vector<double> values;
    double default_sigma;
};

/// CT-shaped kernel: 28 samples, 2 s spacing to 36 s, then sparser to 120 s.
inline RawKernelSamples synthetic_ct_kernel() {
    RawKernelSamples k{"gCT", {}, {}, 25.0};
    for (int s = 0; s <= 36; s += 2) k.times.push_back(s);
    for (double s : {40.0, 45.0, 50.0, 60.0, 70.0, 80.0, 90.0, 105.0, 120.0}) k.times.push_back(s);
    for (double s : k.times) {
        k.values.push_back(400.0 * detail::gamma_variate(s, 12.0, 3.0) + 60.0 * detail::gamma_variate(s - 16.0, 10.0, 2.0) +
                           40.0 * (1.0 - std::exp(-s / 8.0)) * std::exp(-s / 300.0));
    }
    return k;
}

/// MRI-shaped kernel: 91 samples every 2 s over 180 s.
inline RawKernelSamples synthetic_mri_kernel() {
    RawKernelSamples k{"gMRI", {}, {}, 60.0};
    for (int i = 0; i < 91; ++i) k.times.push_back(2.0 * i);
    for (double s : k.times) {
        k.values.push_back(900.0 * detail::gamma_variate(s, 14.0, 3.0) +
                           150.0 * detail::gamma_variate(s - 18.0, 12.0, 2.0) +
                           120.0 * (1.0 - std::exp(-s / 10.0)) * std::exp(-s / 400.0));
    }
    return k;
}

// ---------------------------------------------------------------------------
// Noise

enum class NoiseDistribution { gaussian, uniform, rademacher };

inline NoiseDistribution noise_distribution_from_string(const std::string& s) {
    if (s == "gaussian") return NoiseDistribution::gaussian;
    if (s == "uniform") return NoiseDistribution::uniform;
    if (s == "rademacher") return NoiseDistribution::rademacher;
    throw InvalidArgument("unknown noise distribution '" + s + "'");
}

/// i.i.d. mean-zero unit-variance draws scaled by sigma.
struct NoiseModel {
    double sigma = 0.0;
    NoiseDistribution distribution = NoiseDistribution::gaussian;
    std::uint64_t seed = 0;

    /// Independent stream for replicate `index`.
    std::mt19937_64 stream(std::uint64_t index) const {
        std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                          static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
        return std::mt19937_64(seq);
    }

    double unit(std::mt19937_64& rng) const {
        switch (distribution) {
            case NoiseDistribution::uniform:
                return std::sqrt(3.0) * std::uniform_real_distribution<double>(-1.0, 1.0)(rng);
            case NoiseDistribution::rademacher:
                return (rng() & 1u) ? 1.0 : -1.0;
            case NoiseDistribution::gaussian:
            default:
                return std::normal_distribution<double>(0.0, 1.0)(rng);
        }
    }

    std::vector<double> draw(std::span<const double> mean, std::uint64_t index) const {
        auto rng = stream(index);
        std::vector<double> y(mean.begin(), mean.end());
        for (double& v : y) v += sigma * unit(rng);
        return y;
    }
};

// ---------------------------------------------------------------------------
// Convolution truth and error metric

namespace detail {
/// Composite trapezoid of int_0^{t_i} g(t_i - tau) f(tau) dtau with each grid
/// interval (and [0, t_1] when t_1 > 0) split into `refine` pieces.
template <class G, class F>
std::vector<double> refined_trapezoid(const G& g, const F& f, const SampleGrid& grid, std::size_t refine) {
    const auto t = grid.times();
    std::vector<double> knots;
    if (t[0] > 0.0) knots.push_back(0.0);
    knots.insert(knots.end(), t.begin(), t.end());
    const std::size_t offset = t[0] > 0.0 ? 1 : 0;
    std::vector<double> tau{knots[0]};
    for (std::size_t j = 0; j + 1 < knots.size(); ++j) {
        const double h = (knots[j + 1] - knots[j]) / static_cast<double>(refine);
        for (std::size_t r = 1; r < refine; ++r) tau.push_back(knots[j] + h * static_cast<double>(r));
        tau.push_back(knots[j + 1]);
    }
    std::vector<double> fv(tau.size());
    for (std::size_t k = 0; k < tau.size(); ++k) fv[k] = f(tau[k]);
    std::vector<double> q(t.size(), 0.0);
    for (std::size_t i = 0; i < t.size(); ++i) {
        const std::size_t end = (offset + i) * refine;
        double s = 0.0;
        double prev = g(t[i] - tau[0]) * fv[0];
        for (std::size_t k = 1; k <= end; ++k) {
            const double cur = g(t[i] - tau[k]) * fv[k];
            s += 0.5 * (tau[k] - tau[k - 1]) * (prev + cur);
            prev = cur;
        }
        q[i] = s;
    }
    return q;
}
}  // namespace detail

inline constexpr std::size_t kTrueQRefinement = 32;

/// q(t_i) = int_0^{t_i} g(t_i - tau) f(tau) dtau. Closed-form kernels use
/// Richardson extrapolation of the refined trapezoid at 32 and 64 pieces per
/// interval; sampled kernels use the refinement-32 trapezoid on the linear
/// interpolant of the samples, which must lie on `grid`.
inline std::vector<double> true_q(const KernelSpec& kernel, const TestFunction& f, const SampleGrid& grid) {
    if (kernel.sampled()) {
        const auto g = kernel.samples(grid);  // validates the grid
        const auto t = grid.times();
        return detail::refined_trapezoid([&](double x) { return interp_linear(t, g, x); }, f, grid, kTrueQRefinement);
    }
    const auto coarse = detail::refined_trapezoid(kernel.closed_form, f, grid, kTrueQRefinement);
    const auto fine = detail::refined_trapezoid(kernel.closed_form, f, grid, 2 * kTrueQRefinement);
    std::vector<double> q(coarse.size());
    for (std::size_t i = 0; i < q.size(); ++i) q[i] = (4.0 * fine[i] - coarse[i]) / 3.0;
    return q;
}

/// Trapezoid integral of (f_hat - f)^2 over [t_1, t_n]. With interior_fraction
/// < 1, the same integral over the middle part of that interval, trimmed
/// equally at both ends; the squared error is linearly interpolated at the cuts.
inline double ise(const SampleGrid& grid, std::span<const double> f_hat, std::span<const double> f_true,
                  double interior_fraction = 1.0) {
    if (f_hat.size() != grid.size() || f_true.size() != grid.size()) {
        throw InvalidArgument("ise: length mismatch (" + std::to_string(f_hat.size()) + ", " +
                              std::to_string(f_true.size()) + ") for " + std::to_string(grid.size()) + " grid points");
    }
    if (!(interior_fraction > 0.0 && interior_fraction <= 1.0)) {
        throw InvalidArgument("ise: interior_fraction must be in (0, 1]");
    }
    const auto t = grid.times();
    const std::size_t n = t.size();
    std::vector<double> e(n);
    for (std::size_t i = 0; i < n; ++i) e[i] = (f_hat[i] - f_true[i]) * (f_hat[i] - f_true[i]);
    const double trim = 0.5 * (1.0 - interior_fraction) * (t[n - 1] - t[0]);
    const double lo = t[0] + trim, hi = t[n - 1] - trim;
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double a = std::max(t[i], lo), b = std::min(t[i + 1], hi);
        if (!(b > a)) continue;
        const double ea = interp_linear(t.subspan(i, 2), std::span<const double>(e).subspan(i, 2), a);
        const double eb = interp_linear(t.subspan(i, 2), std::span<const double>(e).subspan(i, 2), b);
        s += 0.5 * (b - a) * (ea + eb);
    }
    return s;
}

// ---------------------------------------------------------------------------
// Monte Carlo runner

/// One benchmark cell: what the estimators see (grid, kernel samples) and
/// the truth used for scoring.
struct Cell {
    std::string kernel_id;
    std::string function_id;
    SampleGrid grid;
    std::vector<double> g_samples;
    std::vector<double> q_true;
    std::vector<double> f_true;
    double sigma = 0.0;
    double beta = 0.0;  ///< true f(0)
};

struct RunOptions {
    std::vector<double> a_grid = default_a_grid();
    FitOptions fit;
    double kappa = 1.0;
    bool baselines = false;
    bool oracle = false;
    NoiseDistribution noise = NoiseDistribution::gaussian;
    std::size_t workers = worker_count();
};

struct RunRecord {
    std::size_t replicate = 0;
    double ise = 0.0;
    double ise_interior = 0.0;
    double a_hat = 0.0;
    std::size_t m_hat = 0;
    std::size_t max_order = 0;
    double beta_hat = 0.0;
    /// min over m of 10 ISE(f_m) + 72 sigma^2 rho_1^2 T/(m n) at a_hat; NaN unless requested.
    double oracle_bound = std::numeric_limits<double>::quiet_NaN();
    double ise_tikh = std::numeric_limits<double>::quiet_NaN();
    double ise_tsvd = std::numeric_limits<double>::quiet_NaN();
    double lambda = std::numeric_limits<double>::quiet_NaN();
    double drop_k = std::numeric_limits<double>::quiet_NaN();
    double beta_tikh = std::numeric_limits<double>::quiet_NaN();
    double beta_tsvd = std::numeric_limits<double>::quiet_NaN();
    double bandwidth = std::numeric_limits<double>::quiet_NaN();

    double ratio_tikh() const { return ise_tikh / ise; }
    double ratio_tsvd() const { return ise_tsvd / ise; }
};

struct RunSummary {
    std::string kernel_id;
    std::string function_id;
    std::size_t n = 0;
    double sigma = 0.0;
    std::size_t replicates = 0;
    std::uint64_t seed = 0;
    double mean_ise = 0.0;
    double sd_ise = 0.0;
    std::vector<RunRecord> records;

    std::vector<double> column(double RunRecord::*field) const {
        std::vector<double> out;
        out.reserve(records.size());
        for (const auto& r : records) out.push_back(r.*field);
        return out;
    }
    std::vector<double> ratios_tikh() const {
        std::vector<double> out;
        for (const auto& r : records) out.push_back(r.ratio_tikh());
        return out;
    }
    std::vector<double> ratios_tsvd() const {
        std::vector<double> out;
        for (const auto& r : records) out.push_back(r.ratio_tsvd());
        return out;
    }
};

/// Interior fraction used for the trimmed ISE column.
inline constexpr double kInteriorFraction = 0.8;

inline RunSummary run_cell(const Cell& cell, std::size_t replicates, std::uint64_t seed, const RunOptions& opts = {}) {
    if (replicates < 1) throw InvalidArgument("run: need at least one replicate");
    const Deconvolver dec(cell.grid, cell.g_samples, opts.a_grid, opts.fit);
    std::optional<SvdFilter> svd;
    if (opts.baselines) svd.emplace(dec.convolution());
    const NoiseModel noise{cell.sigma, opts.noise, seed};
    const PenaltyConfig cfg{cell.sigma, opts.kappa, cell.grid.horizon(), cell.grid.size()};
    const auto t = cell.grid.times();

    RunSummary out;
    out.kernel_id = cell.kernel_id;
    out.function_id = cell.function_id;
    out.n = cell.grid.size();
    out.sigma = cell.sigma;
    out.replicates = replicates;
    out.seed = seed;
    out.records.resize(replicates);

    parallel_for(
        replicates,
        [&](std::size_t r) {
            const auto y = noise.draw(cell.q_true, r);
            const DeconvFit fit = dec.fit(y, cfg);
            const auto f_hat = reconstruct(fit.f_hat, t);
            RunRecord rec;
            rec.replicate = r;
            rec.ise = ise(cell.grid, f_hat, cell.f_true);
            rec.ise_interior = ise(cell.grid, f_hat, cell.f_true, kInteriorFraction);
            rec.a_hat = fit.a_hat;
            rec.m_hat = fit.m_hat;
            rec.max_order = fit.max_order;
            rec.beta_hat = f_hat.empty() ? 0.0 : reconstruct(fit.f_hat, 0.0);
            if (opts.oracle) {
                const ScalePlan* plan = dec.plan_at(fit.a_hat);
                const Eigen::MatrixXd& X = plan->context().design();
                const double T = cell.grid.horizon(), n = static_cast<double>(cell.grid.size());
                const double rho1 = fit.scores.rho_sq.front();
                Eigen::VectorXd fm = Eigen::VectorXd::Zero(X.rows());
                double best = std::numeric_limits<double>::infinity();
                for (std::size_t m = 1; m <= fit.max_order; ++m) {
                    fm += fit.f_hat_full[m - 1] * X.col(static_cast<Eigen::Index>(m - 1));
                    const double e = ise(cell.grid, std::span<const double>(fm.data(), t.size()), cell.f_true);
                    best = std::min(best, 10.0 * e + 72.0 * cell.sigma * cell.sigma * rho1 * T /
                                                          (static_cast<double>(m) * n));
                }
                rec.oracle_bound = best;
            }
            if (svd) {
                const auto qt = presmooth(cell.grid, y);
                rec.bandwidth = qt.bandwidth;
                const auto tk = tune_baseline(*svd, y, qt.values, BaselineMethod::tikhonov);
                const auto ts = tune_baseline(*svd, y, qt.values, BaselineMethod::tsvd);
                rec.lambda = tk.hyperparameter;
                rec.drop_k = ts.hyperparameter;
                rec.ise_tikh = ise(cell.grid, tk.solution, cell.f_true);
                rec.ise_tsvd = ise(cell.grid, ts.solution, cell.f_true);
                rec.beta_tikh = tk.solution.front();
                rec.beta_tsvd = ts.solution.front();
            }
            out.records[r] = rec;
        },
        opts.workers);

    const auto ises = out.column(&RunRecord::ise);
    out.mean_ise = stats::mean(ises);
    out.sd_ise = stats::sd(ises);
    return out;
}

/// Noise level sigma_0(g) / 2^i.
inline double noise_level(const KernelSpec& kernel, int noise_step) {
    if (noise_step < 0) throw InvalidArgument("noise step must be >= 0");
    return kernel.nominal_sigma / std::ldexp(1.0, noise_step);
}

/// Setting 1: closed-form kernel, equispaced grid t_i = (i-1) T/(n-1) on [0, 10].
inline Cell setting1_cell(const std::string& kernel_id, const std::string& function_id, std::size_t n,
                          int noise_step) {
    const KernelSpec g = kernel_by_id(kernel_id);
    const TestFunction f = test_function(function_id);
    auto grid = SampleGrid::equispaced(n, 10.0);
    Cell c{kernel_id, function_id, grid, g.samples(grid), true_q(g, f, grid), {}, noise_level(g, noise_step), f(0.0)};
    for (double ti : grid.times()) c.f_true.push_back(f(ti));
    return c;
}

inline RunSummary run_setting1(const std::string& kernel_id, const std::string& function_id, std::size_t n,
                               int noise_step, std::size_t replicates, std::uint64_t seed, RunOptions opts = {}) {
    return run_cell(setting1_cell(kernel_id, function_id, n, noise_step), replicates, seed, opts);
}

inline constexpr double kSetting2Beta = 0.5;

/// Setting 2: sampled kernel in raw time units, rescaled to [0, 10]; the truth
/// is beta * f on the rescaled axis.
inline Cell setting2_cell(const RawKernelSamples& kernel, const std::string& function_id, double sigma,
                          double beta = kSetting2Beta) {
    if (kernel.times.size() != kernel.values.size()) throw InvalidArgument("kernel file: column length mismatch");
    const std::size_t expected = kernel.id == "gMRI" ? 91 : kernel.id == "gCT" ? 28 : 0;
    if (expected && kernel.times.size() != expected) {
        throw InvalidArgument("kernel file: " + kernel.id + " needs " + std::to_string(expected) + " rows, got " +
                              std::to_string(kernel.times.size()));
    }
    if (function_id == "f1") throw InvalidArgument("setting 2 uses survival-type test functions f2, f3 or f4");
    const TestFunction f = test_function(function_id).scaled(beta);
    SampleGrid grid(rescale_times(kernel.times), 10.0);
    const KernelSpec g = sampled_kernel(kernel.id, {grid.times().begin(), grid.times().end()}, kernel.values);
    Cell c{kernel.id, function_id, grid, kernel.values, true_q(g, f, grid), {}, sigma, f(0.0)};
    for (double ti : grid.times()) c.f_true.push_back(f(ti));
    return c;
}

inline RunSummary run_setting2(const RawKernelSamples& kernel, const std::string& function_id, double sigma,
                               std::size_t replicates, std::uint64_t seed, RunOptions opts = {}) {
    opts.baselines = true;
    return run_cell(setting2_cell(kernel, function_id, sigma), replicates, seed, opts);
}

}  // namespace lagdeconv
