#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <memory>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "lagdeconv/coeff_vector.hpp"
#include "lagdeconv/coeffs.hpp"
#include "lagdeconv/convolution.hpp"
#include "lagdeconv/error.hpp"
#include "lagdeconv/grid.hpp"
#include "lagdeconv/laguerre.hpp"
#include "lagdeconv/toeplitz.hpp"

namespace lagdeconv {

/// Noise level and penalty constants. sigma = 0 is accepted and switches the
/// penalty off (noiseless runs).
struct PenaltyConfig {
    double sigma = 0.0;
    double kappa = 1.0;
    double horizon = 0.0;
    std::size_t n = 0;

    void validate() const {
        if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw InvalidArgument("PenaltyConfig: sigma must be >= 0");
        if (!(kappa >= 1.0)) throw InvalidArgument("PenaltyConfig: kappa must be >= 1");
        if (!(horizon > 0.0)) throw InvalidArgument("PenaltyConfig: horizon must be positive");
        if (n < 1) throw InvalidArgument("PenaltyConfig: n must be >= 1");
    }
};

/// Per-order quantities, index m-1 for order m.
struct ModelScores {
    std::vector<double> v_sq;
    std::vector<double> rho_sq;
    std::vector<double> penalty;
    std::vector<double> contrast;
    std::vector<double> objective;

    std::size_t size() const noexcept { return v_sq.size(); }
};

/// A_m = sqrt(n/T) G_m^{-1} J_{m,M} (Phi^T Phi)^{-1} Phi^T, m x n, for an
/// arbitrary n x M design on [0, T].
inline Eigen::MatrixXd build_A(const Eigen::MatrixXd& design, double horizon, const ToeplitzLT& gM, std::size_t m) {
    const auto M = static_cast<std::size_t>(design.cols());
    if (m < 1 || m > M) throw InvalidArgument("build_A: m out of range");
    if (gM.size() != M) throw InvalidArgument("build_A: operator size does not match design");
    const LeastSquaresProjector proj(design, 1.0);
    const Eigen::MatrixXd top = proj.pseudo_inverse().topRows(static_cast<Eigen::Index>(m));
    const double c = std::sqrt(static_cast<double>(design.rows()) / horizon);
    return c * solve_lower(gM, top);
}

inline Eigen::MatrixXd build_A(const LaguerreContext& ctx, const ToeplitzLT& gM, std::size_t m) {
    return build_A(ctx.design(), ctx.grid().horizon(), gM, m);
}

/// Tr(Q_m) with Q_m = (n/T) [(Phi^T Phi)^{-1}]_m ([G_M G_M^T]_m)^{-1}.
inline double trace_Q(const LaguerreContext& ctx, const ToeplitzLT& gM, std::size_t m) {
    if (m < 1 || m > ctx.max_order()) throw InvalidArgument("trace_Q: m out of range");
    const auto mm = static_cast<Eigen::Index>(m);
    const auto M = static_cast<Eigen::Index>(ctx.max_order());
    const Eigen::MatrixXd gram_inv = ctx.gram().ldlt().solve(Eigen::MatrixXd::Identity(M, M));
    const Eigen::MatrixXd G = gM.dense();
    const Eigen::MatrixXd GGt = (G * G.transpose()).topLeftCorner(mm, mm);
    const Eigen::MatrixXd Q = gram_inv.topLeftCorner(mm, mm) * GGt.ldlt().solve(Eigen::MatrixXd::Identity(mm, mm));
    return static_cast<double>(ctx.size()) / ctx.grid().horizon() * Q.trace();
}

/// Objective pieces from precomputed norms and the full coefficient estimate.
inline ModelScores assemble_scores(std::span<const double> v_sq, std::span<const double> rho_sq,
                                   std::span<const double> f_hat_full, const PenaltyConfig& cfg) {
    cfg.validate();
    const std::size_t M = v_sq.size();
    if (rho_sq.size() != M || f_hat_full.size() != M || M == 0) {
        throw InvalidArgument("assemble_scores: inconsistent lengths");
    }
    ModelScores s;
    s.v_sq.assign(v_sq.begin(), v_sq.end());
    s.rho_sq.assign(rho_sq.begin(), rho_sq.end());
    s.penalty.resize(M);
    s.contrast.resize(M);
    s.objective.resize(M);
    const double c = 8.0 * cfg.sigma * cfg.sigma * cfg.horizon / static_cast<double>(cfg.n);
    double norm_sq = 0.0;
    for (std::size_t k = 0; k < M; ++k) {
        const double m = static_cast<double>(k + 1);
        double log_term = 0.0;
        if (k > 0 && rho_sq[0] > 0.0) log_term = std::max(0.0, std::log(m * std::sqrt(rho_sq[k] / rho_sq[0])));
        s.penalty[k] = c * (v_sq[k] + 2.0 * cfg.kappa * rho_sq[k] * log_term);
        norm_sq += f_hat_full[k] * f_hat_full[k];
        s.contrast[k] = -norm_sq;
        s.objective[k] = s.contrast[k] + s.penalty[k];
    }
    return s;
}

/// Smallest m attaining the minimal objective.
inline std::size_t select_model(const ModelScores& scores) {
    if (scores.objective.empty()) throw InvalidArgument("select_model: empty scores");
    std::size_t best = 0;
    for (std::size_t k = 1; k < scores.objective.size(); ++k) {
        if (scores.objective[k] < scores.objective[best]) best = k;
    }
    return best + 1;
}

/// Everything at one scale that does not depend on the observations.
class ScalePlan {
public:
    ScalePlan(const SampleGrid& grid, double scale, std::span<const double> g_samples, std::size_t max_order)
        : ctx_(grid, scale, max_order),
          proj_(ctx_),
          g_coeffs_(proj_.project(g_samples)),
          gM_(from_kernel_coeffs(g_coeffs_, scale)) {
        const double c = std::sqrt(static_cast<double>(grid.size()) / grid.horizon());
        B_ = solve_lower(gM_, proj_.pseudo_inverse());
        const auto M = static_cast<Eigen::Index>(max_order);
        v_sq_.resize(max_order);
        rho_sq_.resize(max_order);
        double cum = 0.0;
        for (Eigen::Index m = 1; m <= M; ++m) {
            const auto A = (c * B_.topRows(m)).eval();
            cum += A.row(m - 1).squaredNorm();
            v_sq_[static_cast<std::size_t>(m - 1)] = cum;
            const Eigen::MatrixXd AAt = A * A.transpose();
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(AAt, Eigen::EigenvaluesOnly);
            rho_sq_[static_cast<std::size_t>(m - 1)] = es.eigenvalues().maxCoeff();
        }
    }

    const LaguerreContext& context() const noexcept { return ctx_; }
    double scale() const noexcept { return ctx_.scale(); }
    std::size_t max_order() const noexcept { return ctx_.max_order(); }
    const CoeffVector& kernel_coeffs() const noexcept { return g_coeffs_; }
    const ToeplitzLT& kernel_operator() const noexcept { return gM_; }
    const LeastSquaresProjector& projector() const noexcept { return proj_; }
    /// G_M^{-1} (Phi^T Phi)^{-1} Phi^T; A_m is sqrt(n/T) times its first m rows.
    const Eigen::MatrixXd& estimator() const noexcept { return B_; }
    std::span<const double> v_sq() const noexcept { return v_sq_; }
    std::span<const double> rho_sq() const noexcept { return rho_sq_; }

    /// f_hat_M = G_M^{-1} q_hat_M.
    CoeffVector full_estimate(std::span<const double> y) const {
        if (static_cast<Eigen::Index>(y.size()) != B_.cols()) throw InvalidArgument("ScalePlan: sample count mismatch");
        const Eigen::Map<const Eigen::VectorXd> yv(y.data(), B_.cols());
        const Eigen::VectorXd f = B_ * yv;
        return CoeffVector({f.data(), f.data() + f.size()}, scale());
    }

private:
    LaguerreContext ctx_;
    LeastSquaresProjector proj_;
    CoeffVector g_coeffs_;
    ToeplitzLT gM_;
    Eigen::MatrixXd B_;
    std::vector<double> v_sq_;
    std::vector<double> rho_sq_;
};

/// Penalty scores at a fixed context from a precomputed q_hat_M.
inline ModelScores scores(const LaguerreContext& ctx, const ToeplitzLT& gM, const PenaltyConfig& cfg,
                          const CoeffVector& q_hat_M) {
    if (!q_hat_M.same_scale(ctx.scale()) || q_hat_M.size() != ctx.max_order() || gM.size() != ctx.max_order()) {
        throw InvalidArgument("scores: q_hat_M and operator must match the context");
    }
    const std::size_t M = ctx.max_order();
    const LeastSquaresProjector proj(ctx);
    const double c = std::sqrt(static_cast<double>(ctx.size()) / ctx.grid().horizon());
    const Eigen::MatrixXd B = solve_lower(gM, proj.pseudo_inverse());
    std::vector<double> v(M), rho(M);
    for (std::size_t m = 1; m <= M; ++m) {
        v[m - 1] = trace_Q(ctx, gM, m);
        const Eigen::MatrixXd A = c * B.topRows(static_cast<Eigen::Index>(m));
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A * A.transpose(), Eigen::EigenvaluesOnly);
        rho[m - 1] = es.eigenvalues().maxCoeff();
    }
    const auto f = solve_lower(gM, q_hat_M.values());
    return assemble_scores(v, rho, f, cfg);
}

/// Outcome at one trial scale.
struct ScaleTrial {
    double scale = 0.0;
    std::size_t max_order = 0;
    std::size_t m_hat = 0;
    double residual_norm = std::numeric_limits<double>::quiet_NaN();
    std::string failure;  ///< nonempty when the scale was skipped
};

struct DeconvFit {
    CoeffVector f_hat{{0.0}, 1.0};       ///< length m_hat
    CoeffVector f_hat_full{{0.0}, 1.0};  ///< unpenalized length-M estimate at a_hat
    std::size_t m_hat = 0;
    std::size_t max_order = 0;
    double eta = 0.0;
    double a_hat = 0.0;
    ModelScores scores;
    std::vector<double> q_hat_basis;  ///< Phi_M G_M (f_hat zero-padded)
    std::vector<double> q_hat_conv;   ///< trapezoid convolution of f_hat with the kernel samples
    double residual_norm = 0.0;       ///< ||y - q_hat_conv|| at a_hat
    double sigma_used = 0.0;
    std::vector<ScaleTrial> trials;

    double beta_hat() const { return reconstruct(f_hat, 0.0); }
};

/// `count` log-spaced points from lo to hi inclusive.
inline std::vector<double> log_grid(double lo, double hi, std::size_t count) {
    if (!(lo > 0.0) || !(hi >= lo) || count < 1) throw InvalidArgument("log_grid: need 0 < lo <= hi and count >= 1");
    std::vector<double> out(count);
    if (count == 1) {
        out[0] = lo;
        return out;
    }
    const double step = std::log(hi / lo) / static_cast<double>(count - 1);
    for (std::size_t i = 0; i < count; ++i) out[i] = lo * std::exp(step * static_cast<double>(i));
    out.back() = hi;
    return out;
}

inline std::vector<double> default_a_grid() { return log_grid(0.1, 5.0, 16); }

struct FitOptions {
    std::size_t max_order_cap = 25;
    double condition_threshold = kDefaultConditionThreshold;
};

/// Holds the per-scale plans for one grid and kernel so that repeated fits
/// (Monte Carlo replicates, several signals sharing a kernel) only pay for the
/// observation-dependent solves.
class Deconvolver {
public:
    Deconvolver(const SampleGrid& grid, std::span<const double> g_samples, std::span<const double> a_grid,
                FitOptions opts = {})
        : grid_(grid), g_(g_samples.begin(), g_samples.end()), conv_(conv_matrix(grid, g_samples)) {
        if (a_grid.empty()) throw InvalidArgument("fit: a_grid must be nonempty");
        if (g_.size() != grid_.size()) throw InvalidArgument("fit: kernel samples do not match grid");
        for (double a : a_grid) {
            if (!(a > 0.0)) throw InvalidArgument("fit: scales must be positive");
            Slot slot{a, {}, {}, 0.0};
            try {
                const auto sel = select_max_order(grid_, a, g_, opts.max_order_cap, opts.condition_threshold);
                slot.eta = sel.eta;
                slot.plan = std::make_shared<const ScalePlan>(grid_, a, g_, sel.max_order);
            } catch (const Error& e) {
                slot.failure = e.what();
            }
            slots_.push_back(std::move(slot));
        }
        if (std::none_of(slots_.begin(), slots_.end(), [](const Slot& s) { return s.plan != nullptr; })) {
            std::string msg = "fit: every scale failed the rank checks";
            for (const auto& s : slots_) msg += "; a=" + std::to_string(s.scale) + ": " + s.failure;
            throw RankDeficient(msg, 0);
        }
    }

    const SampleGrid& grid() const noexcept { return grid_; }
    const ConvMatrix& convolution() const noexcept { return conv_; }

    /// Plan at the i-th scale of the grid, or null if that scale failed.
    const ScalePlan* plan(std::size_t i) const { return slots_.at(i).plan.get(); }
    std::size_t scale_count() const noexcept { return slots_.size(); }

    /// Plan at scale a, or null when a is not on the grid or failed.
    const ScalePlan* plan_at(double a) const {
        for (const auto& s : slots_)
            if (s.scale == a) return s.plan.get();
        return nullptr;
    }

    DeconvFit fit(std::span<const double> y, const PenaltyConfig& cfg) const {
        if (y.size() != grid_.size()) throw InvalidArgument("fit: signal length does not match grid");
        cfg.validate();
        DeconvFit best;
        bool have = false;
        std::vector<ScaleTrial> trials;
        for (const auto& slot : slots_) {
            ScaleTrial trial{slot.scale, 0, 0, std::numeric_limits<double>::quiet_NaN(), slot.failure};
            if (!slot.plan) {
                trials.push_back(trial);
                continue;
            }
            const ScalePlan& p = *slot.plan;
            const CoeffVector f_full = p.full_estimate(y);
            ModelScores sc = assemble_scores(p.v_sq(), p.rho_sq(), f_full.values(), cfg);
            const std::size_t m_hat = select_model(sc);
            const CoeffVector f_hat = f_full.prefix(m_hat);
            const auto f_on_grid = reconstruct(f_hat, grid_.times());
            const auto q_conv = conv_.apply(f_on_grid);
            double r = 0.0;
            for (std::size_t i = 0; i < y.size(); ++i) r += (y[i] - q_conv[i]) * (y[i] - q_conv[i]);
            r = std::sqrt(r);
            trial.max_order = p.max_order();
            trial.m_hat = m_hat;
            trial.residual_norm = r;
            trials.push_back(trial);
            if (!have || r < best.residual_norm || (r == best.residual_norm && slot.scale < best.a_hat)) {
                have = true;
                best.f_hat = f_hat;
                best.f_hat_full = f_full;
                best.m_hat = m_hat;
                best.max_order = p.max_order();
                best.eta = slot.eta;
                best.a_hat = slot.scale;
                best.scores = std::move(sc);
                best.q_hat_conv = q_conv;
                best.residual_norm = r;
            }
        }
        // Basis-space reconstruction Phi_M G_M f_hat at the winning scale.
        if (const ScalePlan* win = plan_at(best.a_hat)) {
            std::vector<double> padded(win->max_order(), 0.0);
            std::copy(best.f_hat.values().begin(), best.f_hat.values().end(), padded.begin());
            const auto qc = win->kernel_operator().apply(padded);
            const Eigen::Map<const Eigen::VectorXd> qv(qc.data(), static_cast<Eigen::Index>(qc.size()));
            const Eigen::VectorXd qb = win->context().design() * qv;
            best.q_hat_basis.assign(qb.data(), qb.data() + qb.size());
        }
        best.sigma_used = cfg.sigma;
        best.trials = std::move(trials);
        return best;
    }

private:
    struct Slot {
        double scale;
        std::shared_ptr<const ScalePlan> plan;
        std::string failure;
        double eta;
    };

    SampleGrid grid_;
    std::vector<double> g_;
    ConvMatrix conv_;
    std::vector<Slot> slots_;
};

/// One-shot estimate: build plans for every scale, fit, return the best.
inline DeconvFit fit(const SampleGrid& grid, std::span<const double> y, std::span<const double> g_samples,
                     const PenaltyConfig& cfg, std::span<const double> a_grid, FitOptions opts = {}) {
    if (y.size() != grid.size() || g_samples.size() != grid.size()) {
        throw InvalidArgument("fit: y and kernel samples must both have one value per grid point");
    }
    return Deconvolver(grid, g_samples, a_grid, opts).fit(y, cfg);
}

/// Sample standard deviation of y[0 .. arrival_index-1].
inline double estimate_sigma(const SampleGrid& grid, std::span<const double> y, std::size_t arrival_index) {
    if (arrival_index < 3) throw InvalidArgument("estimate_sigma: arrival_index must be >= 3");
    if (y.size() != grid.size()) throw InvalidArgument("estimate_sigma: signal length does not match grid");
    if (arrival_index > y.size()) throw InvalidArgument("estimate_sigma: arrival_index beyond the signal");
    const auto pre = y.first(arrival_index);
    const double mean = std::accumulate(pre.begin(), pre.end(), 0.0) / static_cast<double>(pre.size());
    double ss = 0.0;
    for (double v : pre) ss += (v - mean) * (v - mean);
    return std::sqrt(ss / static_cast<double>(pre.size() - 1));
}

/// Extreme eigenvalues of Omega_m = (n/T)[(Phi^T Phi)^{-1}]_m for m = 1..M.
struct OmegaBounds {
    std::vector<double> lambda_min;
    std::vector<double> lambda_max;
    std::vector<std::size_t> flagged;  ///< orders with lambda_min < 1e-3 or lambda_max > 1e3
};

/// From a gram matrix Phi^T Phi of an n-point design on [0, T].
inline OmegaBounds omega_eigen_bounds(const Eigen::MatrixXd& gram, std::size_t n, double horizon) {
    const auto M = gram.rows();
    Eigen::LDLT<Eigen::MatrixXd> ldlt(gram);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive() || !(ldlt.vectorD().cwiseAbs().minCoeff() > 0.0)) {
        throw SingularOperator("omega_eigen_bounds: gram matrix is singular");
    }
    const Eigen::MatrixXd inv = ldlt.solve(Eigen::MatrixXd::Identity(M, M));
    const double c = static_cast<double>(n) / horizon;
    OmegaBounds out;
    for (Eigen::Index m = 1; m <= M; ++m) {
        const Eigen::MatrixXd omega = c * inv.topLeftCorner(m, m);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(omega, Eigen::EigenvaluesOnly);
        const double lo = es.eigenvalues().minCoeff();
        const double hi = es.eigenvalues().maxCoeff();
        out.lambda_min.push_back(lo);
        out.lambda_max.push_back(hi);
        if (lo < 1e-3 || hi > 1e3) out.flagged.push_back(static_cast<std::size_t>(m));
    }
    return out;
}

inline OmegaBounds omega_eigen_bounds(const LaguerreContext& ctx) {
    return omega_eigen_bounds(ctx.gram(), ctx.size(), ctx.grid().horizon());
}

}  // namespace lagdeconv
