// lagdeconv command-line tool: estimate, simulate, compare, diagnose.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <complex>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <algorithm>
#include <limits>
#include <iostream>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "lagdeconv/csv.hpp"
#include "lagdeconv/lagdeconv.hpp"
#include "lagdeconv/svg.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace lagdeconv;

namespace {

constexpr int kSchemaVersion = 1;

// ---------------------------------------------------------------------------
// Shared options

struct ScaleOptions {
    std::vector<double> a_grid;
    std::optional<double> a_min, a_max;
    std::size_t a_count = 16;

    std::vector<double> resolve() const {
        if (!a_grid.empty()) return a_grid;
        return log_grid(a_min.value_or(0.1), a_max.value_or(5.0), a_count);
    }
};

struct OutputOptions {
    std::string out_dir = ".";
    std::vector<std::string> formats{"csv", "json"};

    bool wants(const std::string& f) const {
        for (const auto& x : formats)
            if (x == f) return true;
        return false;
    }
};

void add_scale_options(CLI::App* cmd, ScaleOptions& s) {
    auto* grid = cmd->add_option("--a-grid", s.a_grid, "Comma-separated Laguerre scales to try")->delimiter(',');
    auto* lo = cmd->add_option("--a-min", s.a_min, "Smallest scale of the log-spaced grid (default 0.1)");
    auto* hi = cmd->add_option("--a-max", s.a_max, "Largest scale of the log-spaced grid (default 5)");
    auto* cnt = cmd->add_option("--a-count", s.a_count, "Number of log-spaced scales (default 16)")
                    ->check(CLI::PositiveNumber);
    grid->excludes(lo)->excludes(hi)->excludes(cnt);
}

void add_output_options(CLI::App* cmd, OutputOptions& o) {
    cmd->add_option("--out-dir", o.out_dir, "Directory for report files")->capture_default_str();
    cmd->add_option("--format", o.formats, "Output formats: csv, json, svg (comma-separated)")
        ->delimiter(',')
        ->check(CLI::IsMember({"csv", "json", "svg"}))
        ->capture_default_str();
}

/// Writes through a temporary file renamed into place, so a report exists
/// only once it is complete.
void write_file(const fs::path& path, const std::function<void(std::ostream&)>& body) {
    fs::create_directories(path.parent_path().empty() ? fs::path(".") : path.parent_path());
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw Error("cannot write '" + tmp.string() + "'");
        body(out);
        out.flush();
        if (!out) throw Error("write failed for '" + tmp.string() + "'");
    }
    fs::rename(tmp, path);
}

void write_json(const fs::path& path, const json& j) {
    write_file(path, [&](std::ostream& out) { out << j.dump(2) << '\n'; });
}

json schema_tag(const std::string& name) { return {{"name", name}, {"version", kSchemaVersion}}; }

json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

// ---------------------------------------------------------------------------
// Kernel / cell selection shared by simulate and compare

struct CellOptions {
    std::string kernel = "g2";
    std::string kernel_file;
    std::string function = "f1";
    std::size_t n = 100;
    int noise_step = 5;
    std::optional<double> sigma;
    double beta = kSetting2Beta;
    std::size_t reps = 400;
    std::uint64_t seed = 1;
    std::size_t max_order = 25;
    double threshold = kDefaultConditionThreshold;
    std::string noise = "gaussian";
};

void add_cell_options(CLI::App* cmd, CellOptions& c) {
    auto* k = cmd->add_option("--kernel", c.kernel, "Closed-form kernel g1..g5")
                  ->check(CLI::IsMember({"g1", "g2", "g3", "g4", "g5"}))
                  ->capture_default_str();
    auto* kf = cmd->add_option("--kernel-file", c.kernel_file,
                               "Sampled kernel CSV (time, value); switches to the sampled-kernel setting")
                   ->check(CLI::ExistingFile);
    k->excludes(kf);
    cmd->add_option("--function", c.function, "Test function f1..f4")
        ->check(CLI::IsMember({"f1", "f2", "f3", "f4"}))
        ->capture_default_str();
    cmd->add_option("--n", c.n, "Sample size on the equispaced [0,10] grid")->capture_default_str();
    cmd->add_option("--noise-step", c.noise_step, "Noise level sigma0(g)/2^i")->capture_default_str();
    cmd->add_option("--sigma", c.sigma, "Noise standard deviation (overrides the noise ladder)")
        ->check(CLI::NonNegativeNumber);
    cmd->add_option("--beta", c.beta, "Scale of the test function for sampled kernels")->capture_default_str();
    cmd->add_option("--reps", c.reps, "Monte Carlo replicates")->check(CLI::PositiveNumber)->capture_default_str();
    cmd->add_option("--seed", c.seed, "Root random seed")->capture_default_str();
    cmd->add_option("--max-order", c.max_order, "Cap on the Laguerre truncation M")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--condition-threshold", c.threshold, "Condition-number cutoff of the rank rule")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--noise", c.noise, "Noise distribution")
        ->check(CLI::IsMember({"gaussian", "uniform", "rademacher"}))
        ->capture_default_str();
}

RawKernelSamples load_raw_kernel(const std::string& path) {
    const auto s = csv::read_series(path);
    RawKernelSamples k;
    k.id = s.t.size() == 28 ? "gCT" : s.t.size() == 91 ? "gMRI" : "custom";
    k.times = s.t;
    k.values = s.v;
    k.default_sigma = k.id == "gCT" ? 25.0 : k.id == "gMRI" ? 60.0 : 0.0;
    return k;
}

Cell make_cell(const CellOptions& c) {
    if (!c.kernel_file.empty()) {
        const auto raw = load_raw_kernel(c.kernel_file);
        double sigma = c.sigma.value_or(raw.default_sigma);
        if (!c.sigma && raw.id == "custom") throw InvalidArgument("--sigma is required for a custom kernel file");
        Cell cell = setting2_cell(raw, c.function, sigma, c.beta);
        cell.kernel_id = fs::path(c.kernel_file).stem().string();
        return cell;
    }
    Cell cell = setting1_cell(c.kernel, c.function, c.n, c.noise_step);
    if (c.sigma) cell.sigma = *c.sigma;
    return cell;
}

RunOptions make_run_options(const CellOptions& c, const ScaleOptions& s) {
    RunOptions o;
    o.a_grid = s.resolve();
    o.fit.max_order_cap = c.max_order;
    o.fit.condition_threshold = c.threshold;
    o.noise = noise_distribution_from_string(c.noise);
    return o;
}

json cell_json(const Cell& cell, const CellOptions& c) {
    json j{{"kernel", cell.kernel_id},   {"function", cell.function_id}, {"n", cell.grid.size()},
           {"horizon", cell.grid.horizon()}, {"sigma", cell.sigma},  {"beta", cell.beta},
           {"replicates", c.reps},       {"seed", c.seed},               {"noise", c.noise}};
    if (c.kernel_file.empty()) j["noise_step"] = c.noise_step;
    return j;
}

// ---------------------------------------------------------------------------
// estimate

struct EstimateOptions {
    std::string signal;
    std::string kernel;
    std::optional<double> sigma;
    bool estimate_sigma = false;
    std::size_t arrival_index = 0;
    std::optional<double> horizon;
    std::size_t max_order = 25;
    double threshold = kDefaultConditionThreshold;
    double kappa = 1.0;
    ScaleOptions scales;
    OutputOptions out;
};

int cmd_estimate(const EstimateOptions& o) {
    const auto sig = csv::read_series(o.signal);
    const auto ker = csv::read_series(o.kernel);
    if (sig.t.size() != ker.t.size()) {
        throw Error("grid mismatch at row " + std::to_string(std::min(sig.t.size(), ker.t.size()) + 1) +
                    ": signal has " + std::to_string(sig.t.size()) + " rows, kernel has " +
                    std::to_string(ker.t.size()));
    }
    for (std::size_t i = 0; i < sig.t.size(); ++i) {
        if (std::abs(sig.t[i] - ker.t[i]) > 1e-9) {
            throw Error("grid mismatch at row " + std::to_string(i + 1) + " (signal line " +
                        std::to_string(sig.lines[i]) + ", kernel line " + std::to_string(ker.lines[i]) + ")");
        }
    }
    const SampleGrid grid(sig.t, o.horizon.value_or(sig.t.back()));

    double sigma = 0.0;
    std::string sigma_source;
    if (o.estimate_sigma) {
        sigma = estimate_sigma(grid, sig.v, o.arrival_index);
        sigma_source = "estimated";
    } else {
        sigma = *o.sigma;
        sigma_source = "given";
    }
    const PenaltyConfig cfg{sigma, o.kappa, grid.horizon(), grid.size()};
    FitOptions fo;
    fo.max_order_cap = o.max_order;
    fo.condition_threshold = o.threshold;
    const auto a_grid = o.scales.resolve();
    const DeconvFit fit = lagdeconv::fit(grid, sig.v, ker.v, cfg, a_grid, fo);
    const auto f_curve = reconstruct(fit.f_hat, grid.times());

    const fs::path dir(o.out.out_dir);
    if (o.out.wants("json")) {
        json scores = json::array();
        for (std::size_t k = 0; k < fit.scores.size(); ++k) {
            scores.push_back({{"m", k + 1},
                              {"v_sq", fit.scores.v_sq[k]},
                              {"rho_sq", fit.scores.rho_sq[k]},
                              {"penalty", fit.scores.penalty[k]},
                              {"contrast", fit.scores.contrast[k]},
                              {"objective", fit.scores.objective[k]}});
        }
        json trials = json::array();
        for (const auto& t : fit.trials) {
            json tj{{"a", t.scale}, {"max_order", t.max_order}, {"m_hat", t.m_hat},
                    {"residual_norm", number(t.residual_norm)}};
            if (!t.failure.empty()) tj["failure"] = t.failure;
            trials.push_back(tj);
        }
        json report{{"schema", schema_tag("lagdeconv.estimate")},
                     {"inputs", {{"signal", o.signal}, {"kernel", o.kernel}, {"n", grid.size()},
                                 {"horizon", grid.horizon()}}},
                     {"sigma_used", fit.sigma_used},
                     {"sigma_source", sigma_source},
                     {"kappa", o.kappa},
                     {"a_grid", a_grid},
                     {"a_hat", fit.a_hat},
                     {"max_order", fit.max_order},
                     {"eta", fit.eta},
                     {"m_hat", fit.m_hat},
                     {"f_hat", {{"scale", fit.f_hat.scale()},
                                {"coefficients", std::vector<double>(fit.f_hat.values().begin(),
                                                                     fit.f_hat.values().end())}}},
                     {"beta_hat", fit.beta_hat()},
                     {"residual_norm", fit.residual_norm},
                     {"scores", scores},
                     {"trials", trials}};
        if (o.estimate_sigma) report["arrival_index"] = o.arrival_index;
        write_json(dir / "estimate.json", report);
    }
    if (o.out.wants("csv")) {
        write_file(dir / "estimate.csv", [&](std::ostream& out) {
            csv::Writer w(out, "lagdeconv.estimate-curve", kSchemaVersion,
                          {"t", "y", "f_hat", "q_hat", "q_hat_basis"});
            w.comment("a_hat=" + csv::format(fit.a_hat) + " m_hat=" + std::to_string(fit.m_hat) +
                      " sigma_used=" + csv::format(fit.sigma_used));
            for (std::size_t i = 0; i < grid.size(); ++i) {
                w.row(grid[i], sig.v[i], f_curve[i], fit.q_hat_conv[i], fit.q_hat_basis[i]);
            }
        });
    }
    if (o.out.wants("svg")) {
        write_file(dir / "estimate.svg", [&](std::ostream& out) {
            const std::vector<double> t(grid.times().begin(), grid.times().end());
            svg::line_plot(out, "Deconvolution estimate (a=" + csv::format(fit.a_hat) + ", m=" +
                                    std::to_string(fit.m_hat) + ")",
                           {{"y", t, sig.v, "#7f7f7f", true},
                            {"q_hat", t, fit.q_hat_conv, "#2ca02c", false}});
        });
        write_file(dir / "estimate_f.svg", [&](std::ostream& out) {
            const std::vector<double> t(grid.times().begin(), grid.times().end());
            svg::line_plot(out, "f_hat", {{"f_hat", t, f_curve, "#d62728", false}});
        });
    }
    std::cout << "a_hat=" << fit.a_hat << " m_hat=" << fit.m_hat << " beta_hat=" << fit.beta_hat()
              << " residual_norm=" << fit.residual_norm << '\n';
    return 0;
}

// ---------------------------------------------------------------------------
// simulate

int cmd_simulate(const CellOptions& c, const ScaleOptions& s, const OutputOptions& out) {
    const Cell cell = make_cell(c);
    if (c.reps == 1) std::cerr << "warning: a single replicate; sd reported as 0\n";
    RunOptions opts = make_run_options(c, s);
    const RunSummary sum = run_cell(cell, c.reps, c.seed, opts);
    const fs::path dir(out.out_dir);
    const double mean_e4 = sum.mean_ise * 1e4, sd_e4 = sum.sd_ise * 1e4;
    const auto interior = sum.column(&RunRecord::ise_interior);
    const double mean_int_e4 = stats::mean(interior) * 1e4;
    if (out.wants("csv")) {
        write_file(dir / "simulate_summary.csv", [&](std::ostream& os) {
            csv::Writer w(os, "lagdeconv.simulate-summary", kSchemaVersion,
                          {"kernel", "function", "n", "noise_step", "sigma", "replicates", "seed", "mean_ise_e4",
                           "sd_ise_e4", "mean_ise_interior_e4"});
            w.row(cell.kernel_id, cell.function_id, cell.grid.size(),
                  c.kernel_file.empty() ? std::to_string(c.noise_step) : std::string("NA"), cell.sigma, c.reps,
                  std::to_string(c.seed), mean_e4, sd_e4, mean_int_e4);
        });
        write_file(dir / "simulate_runs.csv", [&](std::ostream& os) {
            csv::Writer w(os, "lagdeconv.simulate-runs", kSchemaVersion,
                          {"replicate", "ise", "ise_interior", "a_hat", "m_hat", "max_order", "beta_hat"});
            for (const auto& r : sum.records)
                w.row(r.replicate, r.ise, r.ise_interior, r.a_hat, r.m_hat, r.max_order, r.beta_hat);
        });
    }
    if (out.wants("json")) {
        write_json(dir / "simulate.json", {{"schema", schema_tag("lagdeconv.simulate")},
                                           {"cell", cell_json(cell, c)},
                                           {"a_grid", opts.a_grid},
                                           {"mean_ise_e4", mean_e4},
                                           {"sd_ise_e4", sd_e4},
                                           {"mean_ise_interior_e4", mean_int_e4}});
    }
    if (out.wants("svg")) {
        write_file(dir / "simulate.svg", [&](std::ostream& os) {
            std::vector<double> e4;
            for (double v : sum.column(&RunRecord::ise)) e4.push_back(v * 1e4);
            svg::box_plot(os, "ISE x 1e4: " + cell.kernel_id + "/" + cell.function_id, {"LAG"}, {e4});
        });
    }
    std::cout << cell.kernel_id << ',' << cell.function_id << ",n=" << cell.grid.size() << ",sigma=" << cell.sigma
              << ": mean ISE x1e4 = " << mean_e4 << " (sd " << sd_e4 << ")\n";
    return 0;
}

// ---------------------------------------------------------------------------
// compare

int cmd_compare(const CellOptions& c, const ScaleOptions& s, const OutputOptions& out) {
    const Cell cell = make_cell(c);
    RunOptions opts = make_run_options(c, s);
    opts.baselines = true;
    const RunSummary sum = run_cell(cell, c.reps, c.seed, opts);
    const auto rt = sum.ratios_tikh(), rs = sum.ratios_tsvd();
    auto log10v = [](const std::vector<double>& v) {
        std::vector<double> o;
        for (double x : v) o.push_back(std::log10(x));
        return o;
    };
    const fs::path dir(out.out_dir);
    struct Row {
        std::string name;
        std::vector<double> values;
    };
    const std::vector<Row> rows{{"ratio_tikh", rt},
                                {"ratio_tsvd", rs},
                                {"log10_ratio_tikh", log10v(rt)},
                                {"log10_ratio_tsvd", log10v(rs)},
                                {"beta_lag", sum.column(&RunRecord::beta_hat)},
                                {"beta_tikh", sum.column(&RunRecord::beta_tikh)},
                                {"beta_tsvd", sum.column(&RunRecord::beta_tsvd)}};
    if (out.wants("csv")) {
        write_file(dir / "compare_runs.csv", [&](std::ostream& os) {
            csv::Writer w(os, "lagdeconv.compare-runs", kSchemaVersion,
                          {"replicate", "ise_lag", "ise_tikh", "ise_tsvd", "ratio_tikh", "ratio_tsvd",
                           "log10_ratio_tikh", "log10_ratio_tsvd", "beta_lag", "beta_tikh", "beta_tsvd", "lambda",
                           "drop_k", "bandwidth", "a_hat", "m_hat"});
            for (const auto& r : sum.records) {
                w.row(r.replicate, r.ise, r.ise_tikh, r.ise_tsvd, r.ratio_tikh(), r.ratio_tsvd(),
                      std::log10(r.ratio_tikh()), std::log10(r.ratio_tsvd()), r.beta_hat, r.beta_tikh, r.beta_tsvd,
                      r.lambda, r.drop_k, r.bandwidth, r.a_hat, r.m_hat);
            }
        });
        write_file(dir / "compare_summary.csv", [&](std::ostream& os) {
            csv::Writer w(os, "lagdeconv.compare-summary", kSchemaVersion,
                          {"statistic", "min", "q25", "median", "q75", "max"});
            w.comment("cell: " + cell.kernel_id + "/" + cell.function_id + " n=" + std::to_string(cell.grid.size()) +
                      " sigma=" + csv::format(cell.sigma) + " replicates=" + std::to_string(c.reps) +
                      " seed=" + std::to_string(c.seed));
            for (const auto& r : rows) {
                const auto f = stats::five_number(r.values);
                w.row(r.name, f.min, f.q25, f.median, f.q75, f.max);
            }
        });
    }
    if (out.wants("json")) {
        json summary;
        for (const auto& r : rows) {
            const auto f = stats::five_number(r.values);
            summary[r.name] = {{"min", number(f.min)},       {"q25", number(f.q25)}, {"median", number(f.median)},
                               {"q75", number(f.q75)}, {"max", number(f.max)}};
        }
        write_json(dir / "compare.json", {{"schema", schema_tag("lagdeconv.compare")},
                                          {"cell", cell_json(cell, c)},
                                          {"mean_ise_lag_e4", sum.mean_ise * 1e4},
                                          {"summary", summary}});
    }
    if (out.wants("svg")) {
        write_file(dir / "compare.svg", [&](std::ostream& os) {
            svg::box_plot(os, "log10 ISE ratio vs LAG: " + cell.kernel_id + "/" + cell.function_id,
                          {"TIKH/LAG", "tSVD/LAG"}, {log10v(rt), log10v(rs)});
        });
    }
    std::cout << "median ISE(TIKH)/ISE(LAG) = " << stats::median(rt)
              << ", median ISE(tSVD)/ISE(LAG) = " << stats::median(rs) << '\n';
    return 0;
}

// ---------------------------------------------------------------------------
// diagnose

struct DiagnoseOptions {
    std::string kernel;
    std::string kernel_file;
    std::size_t n = 100;
    double horizon = 10.0;
    double a = 0.5;
    std::size_t max_order = 25;
    double threshold = kDefaultConditionThreshold;
    bool force_order = false;
    std::size_t growth_min = 10, growth_max = 25;
    std::size_t theta_count = 64;
    OutputOptions out;
};

int cmd_diagnose(const DiagnoseOptions& o) {
    std::optional<SampleGrid> grid;
    std::vector<double> g;
    LaplaceTransform laplace;
    std::string kernel_id;
    std::optional<int> r_order;
    if (!o.kernel_file.empty()) {
        const auto s = csv::read_series(o.kernel_file);
        grid.emplace(s.t, std::max(s.t.back(), o.horizon));
        g = s.v;
        kernel_id = fs::path(o.kernel_file).stem().string();
    } else {
        const KernelSpec k = kernel_by_id(o.kernel);
        grid.emplace(SampleGrid::equispaced(o.n, o.horizon));
        g = k.samples(*grid);
        laplace = k.laplace;
        kernel_id = k.id;
        r_order = k.r_order;
    }
    std::size_t M = std::min(o.max_order, grid->size());
    std::optional<MaxOrderSelection> sel;
    if (!o.force_order) {
        sel = select_max_order(*grid, o.a, g, o.max_order, o.threshold);
        M = sel->max_order;
    }
    const ScalePlan plan(*grid, o.a, g, M);
    const auto omega = omega_eigen_bounds(plan.context());

    std::vector<std::pair<double, double>> pairs;
    for (std::size_t m = o.growth_min; m <= std::min(o.growth_max, M); ++m)
        pairs.emplace_back(static_cast<double>(m), plan.v_sq()[m - 1]);
    std::optional<double> slope;
    std::string slope_note;
    try {
        slope = growth_exponent(pairs);
    } catch (const InvalidArgument& e) {
        slope_note = e.what();
    }

    std::vector<double> thetas;
    for (std::size_t i = 0; i < o.theta_count; ++i)
        thetas.push_back(2.0 * std::numbers::pi * (static_cast<double>(i) + 0.5) / static_cast<double>(o.theta_count));
    const auto sym = symbol_diagnostics(plan.kernel_coeffs(), laplace, o.a, thetas);

    const fs::path dir(o.out.out_dir);
    json table = json::array();
    for (std::size_t m = 1; m <= M; ++m) {
        const bool flagged = std::find(omega.flagged.begin(), omega.flagged.end(), m) != omega.flagged.end();
        table.push_back({{"m", m},
                         {"v_sq", plan.v_sq()[m - 1]},
                         {"rho_sq", plan.rho_sq()[m - 1]},
                         {"omega_lambda_min", omega.lambda_min[m - 1]},
                         {"omega_lambda_max", omega.lambda_max[m - 1]},
                         {"omega_flagged", flagged}});
    }
    json symbol = json::array();
    for (std::size_t i = 0; i < thetas.size(); ++i) {
        json row{{"theta", thetas[i]},
                 {"symbol_re", sym.symbol_values[i].real()},
                 {"symbol_im", sym.symbol_values[i].imag()},
                 {"raw_symbol_re", sym.raw_symbol_values[i].real()},
                 {"raw_symbol_im", sym.raw_symbol_values[i].imag()}};
        if (sym.mapped_laplace) {
            row["laplace_re"] = (*sym.mapped_laplace)[i].real();
            row["laplace_im"] = (*sym.mapped_laplace)[i].imag();
        }
        symbol.push_back(row);
    }
    json report{{"schema", schema_tag("lagdeconv.diagnose")},
                {"kernel", kernel_id},
                {"n", grid->size()},
                {"horizon", grid->horizon()},
                {"a", o.a},
                {"max_order", M},
                {"eta", implied_eta(M, grid->size())},
                {"orders", table},
                {"omega_flagged", omega.flagged},
                {"growth", {{"m_min", o.growth_min},
                            {"m_max", std::min(o.growth_max, M)},
                            {"exponent", slope ? json(*slope) : json(nullptr)}}},
                {"symbol", symbol}};
    if (!slope_note.empty()) report["growth"]["note"] = slope_note;
    if (r_order) report["r_order"] = *r_order;
    if (sel) {
        report["design_condition"] = sel->design_condition;
        report["kernel_condition"] = sel->kernel_condition;
    }
    if (o.out.wants("json")) write_json(dir / "diagnose.json", report);
    if (o.out.wants("csv")) {
        write_file(dir / "diagnose_orders.csv", [&](std::ostream& os) {
            csv::Writer w(os, "lagdeconv.diagnose-orders", kSchemaVersion,
                          {"m", "v_sq", "rho_sq", "omega_lambda_min", "omega_lambda_max"});
            for (std::size_t m = 1; m <= M; ++m)
                w.row(m, plan.v_sq()[m - 1], plan.rho_sq()[m - 1], omega.lambda_min[m - 1], omega.lambda_max[m - 1]);
        });
        write_file(dir / "diagnose_symbol.csv", [&](std::ostream& os) {
            csv::Writer w(os, "lagdeconv.diagnose-symbol", kSchemaVersion,
                          {"theta", "symbol_re", "symbol_im", "laplace_re", "laplace_im"});
            const double nan = std::numeric_limits<double>::quiet_NaN();
            for (std::size_t i = 0; i < thetas.size(); ++i) {
                const auto L = sym.mapped_laplace ? (*sym.mapped_laplace)[i] : std::complex<double>(nan, nan);
                w.row(thetas[i], sym.symbol_values[i].real(), sym.symbol_values[i].imag(), L.real(), L.imag());
            }
        });
    }
    if (o.out.wants("svg")) {
        write_file(dir / "diagnose_growth.svg", [&](std::ostream& os) {
            std::vector<double> lm, lv, lr;
            for (std::size_t m = 1; m <= M; ++m) {
                lm.push_back(std::log(static_cast<double>(m)));
                lv.push_back(std::log(plan.v_sq()[m - 1]));
                lr.push_back(std::log(plan.rho_sq()[m - 1]));
            }
            svg::line_plot(os, "log v_m^2 and log rho_m^2 against log m",
                           {{"v_sq", lm, lv, "#1f77b4", true}, {"rho_sq", lm, lr, "#ff7f0e", true}});
        });
    }
    std::cout << "kernel=" << kernel_id << " a=" << o.a << " M=" << M << " growth_exponent="
              << (slope ? std::to_string(*slope) : std::string("n/a")) << " omega_flagged=" << omega.flagged.size()
              << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Laguerre-basis Laplace deconvolution"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "lagdeconv 0.1.0");

    EstimateOptions est;
    auto* e = app.add_subcommand("estimate", "Estimate f from a signal and sampled kernel on the same grid");
    e->add_option("--signal", est.signal, "CSV with columns (t, y)")->required()->check(CLI::ExistingFile);
    e->add_option("--kernel", est.kernel, "CSV with columns (t, g)")->required()->check(CLI::ExistingFile);
    auto* sg = e->add_option("--sigma", est.sigma, "Noise standard deviation")->check(CLI::NonNegativeNumber);
    auto* es = e->add_flag("--estimate-sigma", est.estimate_sigma,
                           "Estimate sigma from the samples before --arrival-index");
    auto* ai = e->add_option("--arrival-index", est.arrival_index, "Number of pre-arrival baseline samples");
    sg->excludes(es);
    es->needs(ai);
    e->add_option("--horizon", est.horizon, "Observation horizon T (default: last time)");
    e->add_option("--max-order", est.max_order, "Cap on the Laguerre truncation M")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    e->add_option("--condition-threshold", est.threshold, "Condition-number cutoff of the rank rule")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    e->add_option("--kappa", est.kappa, "Penalty constant kappa (>= 1)")->capture_default_str();
    add_scale_options(e, est.scales);
    add_output_options(e, est.out);

    CellOptions sim_cell;
    ScaleOptions sim_scales;
    OutputOptions sim_out;
    auto* s = app.add_subcommand("simulate", "Monte Carlo ISE for one benchmark cell");
    add_cell_options(s, sim_cell);
    add_scale_options(s, sim_scales);
    add_output_options(s, sim_out);

    CellOptions cmp_cell;
    ScaleOptions cmp_scales;
    OutputOptions cmp_out;
    cmp_out.formats = {"csv", "json"};
    auto* c = app.add_subcommand("compare", "ISE ratios of Tikhonov and truncated SVD against the Laguerre estimator");
    add_cell_options(c, cmp_cell);
    add_scale_options(c, cmp_scales);
    add_output_options(c, cmp_out);

    DiagnoseOptions dia;
    auto* d = app.add_subcommand("diagnose", "Omega eigenvalue bounds, v_m^2/rho_m^2 growth and the kernel symbol");
    auto* dk = d->add_option("--kernel", dia.kernel, "Closed-form kernel g1..g5")
                   ->check(CLI::IsMember({"g1", "g2", "g3", "g4", "g5"}));
    auto* dkf = d->add_option("--kernel-file", dia.kernel_file, "Sampled kernel CSV (t, g)")->check(CLI::ExistingFile);
    dk->excludes(dkf);
    d->add_option("--n", dia.n, "Equispaced sample size for closed-form kernels")->capture_default_str();
    d->add_option("--horizon", dia.horizon, "Horizon T")->capture_default_str();
    d->add_option("--a", dia.a, "Laguerre scale")->check(CLI::PositiveNumber)->capture_default_str();
    d->add_option("--max-order", dia.max_order, "Cap on M")->check(CLI::PositiveNumber)->capture_default_str();
    d->add_option("--condition-threshold", dia.threshold, "Condition-number cutoff of the rank rule")
        ->capture_default_str();
    d->add_flag("--force-order", dia.force_order, "Use --max-order as M without the rank rule");
    d->add_option("--growth-min", dia.growth_min, "Smallest m in the growth fit")->capture_default_str();
    d->add_option("--growth-max", dia.growth_max, "Largest m in the growth fit")->capture_default_str();
    d->add_option("--theta-count", dia.theta_count, "Number of symbol evaluation angles")->capture_default_str();
    add_output_options(d, dia.out);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*e) {
            if (!est.sigma && !est.estimate_sigma) throw InvalidArgument("estimate: give --sigma or --estimate-sigma");
            return cmd_estimate(est);
        }
        if (*s) return cmd_simulate(sim_cell, sim_scales, sim_out);
        if (*c) return cmd_compare(cmp_cell, cmp_scales, cmp_out);
        if (*d) {
            if (dia.kernel.empty() && dia.kernel_file.empty()) throw InvalidArgument("diagnose: give --kernel or --kernel-file");
            return cmd_diagnose(dia);
        }
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << '\n';
        return 1;
    }
    return 1;
}
