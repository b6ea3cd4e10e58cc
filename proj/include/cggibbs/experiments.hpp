#ifndef CGGIBBS_EXPERIMENTS_HPP
#define CGGIBBS_EXPERIMENTS_HPP

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "cggibbs/chain.hpp"
#include "cggibbs/condition.hpp"
#include "cggibbs/config.hpp"
#include "cggibbs/data_io.hpp"
#include "cggibbs/dugs.hpp"
#include "cggibbs/ess.hpp"
#include "cggibbs/theory_checks.hpp"
#include "cggibbs/trace_io.hpp"

namespace cggibbs {

// ---------------------------------------------------------------------------
// Cell parallelism
// ---------------------------------------------------------------------------

/// Worker cap from CGGIBBS_THREADS (default 1). Grid commands only use it to
/// run independent cells concurrently; every cell derives its seeds from the
/// config, so all non-timing outputs are identical for any thread count.
inline int thread_budget() {
    const char* env = std::getenv("CGGIBBS_THREADS");
    if (env == nullptr || *env == '\0') return 1;
    const int v = std::atoi(env);
    return v < 1 ? 1 : v;
}

/// Run fn(0..count-1), possibly concurrently. fn must not throw: cells catch
/// their own failures and record them in their preallocated result slot.
template <typename Fn>
inline void run_cells(std::size_t count, Fn&& fn) {
    const int workers = static_cast<int>(
        std::min<std::size_t>(static_cast<std::size_t>(thread_budget()), count));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&]() {
            for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1))
                fn(i);
        });
    for (auto& t : pool) t.join();
}

namespace detail {

inline double ols_slope_xy(const std::vector<double>& xs, const std::vector<double>& ys) {
    if (xs.size() != ys.size() || xs.size() < 2)
        throw std::invalid_argument("ols_slope_xy: need at least two points");
    const double n = static_cast<double>(xs.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    const double denom = n * sxx - sx * sx;
    if (denom == 0.0) throw std::invalid_argument("ols_slope_xy: degenerate abscissae");
    return (n * sxy - sx * sy) / denom;
}

inline double median_of(std::vector<double> v) {
    if (v.empty()) throw std::invalid_argument("median_of: empty");
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size() / 2;
    return v.size() % 2 == 1 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

inline void ensure_parent_dir(const std::string& path) {
    const std::filesystem::path parent = std::filesystem::path(path).parent_path();
    if (!parent.empty()) std::filesystem::create_directories(parent);
}

/// Minimal CSV emitter; every row carries the config hash as its last cell.
class CsvWriter {
  public:
    CsvWriter(const std::string& path, const std::vector<std::string>& columns,
              std::string config_hash)
        : hash_(std::move(config_hash)) {
        ensure_parent_dir(path);
        out_.open(path);
        if (!out_) throw std::runtime_error("cannot open output file " + path);
        for (const auto& c : columns) out_ << c << ',';
        out_ << "config_hash\n";
    }

    void row(const std::vector<std::string>& cells) {
        for (const auto& c : cells) out_ << c << ',';
        out_ << hash_ << '\n';
    }

  private:
    std::ofstream out_;
    std::string hash_;
};

inline std::string fmt_int(long long v) { return std::to_string(v); }

} // namespace detail

// ---------------------------------------------------------------------------
// Config -> domain objects
// ---------------------------------------------------------------------------

inline Kernel kernel_from_string(const std::string& s) {
    if (s == "slice") return Kernel::Slice;
    if (s == "mh") return Kernel::Metropolis;
    throw std::invalid_argument("unknown kernel '" + s + "' (use slice|mh)");
}

inline ScanOrder scan_from_string(const std::string& s) {
    if (s == "dugs") return ScanOrder::Dugs;
    if (s == "rpgs") return ScanOrder::Rpgs;
    if (s == "rsgs") return ScanOrder::Rsgs;
    throw std::invalid_argument("unknown scan '" + s + "' (use dugs|rpgs|rsgs)");
}

inline EvalMode eval_mode_from_string(const std::string& s) {
    if (s == "cached") return EvalMode::Cached;
    if (s == "naive") return EvalMode::Naive;
    throw std::invalid_argument("unknown mode '" + s + "' (use cached|naive)");
}

inline SyntheticSpec::Scenario scenario_from_string(const std::string& s) {
    using Scenario = SyntheticSpec::Scenario;
    if (s == "iid") return Scenario::IidNormal;
    if (s == "1") return Scenario::PrefixSignificant1;
    if (s == "2") return Scenario::PrefixSignificant2;
    if (s == "3") return Scenario::PrefixSignificant3;
    throw std::invalid_argument("unknown scenario '" + s + "' (use iid|1|2|3)");
}

inline PriorSpec prior_from_config(const Config& cfg, const std::string& section) {
    const std::string kind = cfg.get_string(section, "prior", "gaussian");
    if (kind == "gaussian")
        return PriorSpec::gaussian(cfg.get_real(section, "prior_sd", 10.0));
    if (kind == "horseshoe") return PriorSpec::horseshoe();
    throw std::invalid_argument("unknown prior '" + kind + "' (use gaussian|horseshoe)");
}

inline GlmModel model_from_config(const Config& cfg, const std::string& section) {
    GlmModel model;
    model.prior = prior_from_config(cfg, section);
    return model;
}

inline RunConfig run_config_from_config(const Config& cfg, const std::string& section) {
    RunConfig rc;
    rc.kernel = kernel_from_string(cfg.get_string(section, "kernel", "slice"));
    rc.scan = scan_from_string(cfg.get_string(section, "scan", "dugs"));
    rc.eval_mode = eval_mode_from_string(cfg.get_string(section, "mode", "cached"));
    rc.sweeps = static_cast<int>(cfg.get_int(section, "sweeps", 1000));
    rc.warmup = static_cast<int>(cfg.get_int(section, "warmup", 0));
    rc.thin = static_cast<int>(cfg.get_int(section, "thin", 1));
    rc.seed = static_cast<std::uint64_t>(cfg.get_int(section, "seed", 0));
    rc.refresh_every = static_cast<int>(cfg.get_int(section, "refresh_every", 100));
    rc.prior_only = cfg.get_bool(section, "prior_only", false);
    rc.include_latents = cfg.get_bool(section, "include_latents", false);
    rc.slice.w = cfg.get_real(section, "slice_w", 10.0);
    rc.slice.max_doublings =
        static_cast<int>(cfg.get_int(section, "slice_max_doublings", 20));
    rc.mh.step_sd = cfg.get_real(section, "mh_step_sd", 0.5);
    return rc;
}

inline PreprocessSpec::Mode preprocess_mode_from_string(const std::string& s) {
    using Mode = PreprocessSpec::Mode;
    if (s == "auto") return Mode::Auto;
    if (s == "standardize") return Mode::Standardize;
    if (s == "sparse_max_abs") return Mode::SparseMaxAbs;
    throw std::invalid_argument("unknown preprocess mode '" + s +
                                "' (use none|auto|standardize|sparse_max_abs)");
}

/// Where a command's design matrix comes from: per-cell synthetic generation,
/// or a file loaded once and feature-subsampled per cell.
struct DataSource {
    enum class Kind { Synthetic, Csv, Libsvm };
    Kind kind = Kind::Synthetic;
    std::string path;
    std::string y_column = "y";
    Eigen::Index libsvm_d = 0;
    SyntheticSpec synth;                 ///< template; d/seed set per cell
    bool do_preprocess = false;
    PreprocessSpec prep;
    std::uint64_t subsample_seed = 0;    ///< base column-shuffle seed (files)
};

inline DataSource data_source_from_config(const Config& cfg, const std::string& section) {
    DataSource src;
    const std::string kind = cfg.get_string(section, "data", "synthetic");
    if (kind == "synthetic")
        src.kind = DataSource::Kind::Synthetic;
    else if (kind == "csv")
        src.kind = DataSource::Kind::Csv;
    else if (kind == "libsvm")
        src.kind = DataSource::Kind::Libsvm;
    else
        throw std::invalid_argument("unknown data kind '" + kind +
                                    "' (use synthetic|csv|libsvm)");
    src.path = cfg.get_string(section, "path", "");
    if (src.kind != DataSource::Kind::Synthetic && src.path.empty())
        throw std::invalid_argument("config: data = " + kind + " requires a path");
    src.y_column = cfg.get_string(section, "y_column", "y");
    src.libsvm_d = static_cast<Eigen::Index>(cfg.get_int(section, "libsvm_d", 0));

    src.synth.n = static_cast<Eigen::Index>(cfg.get_int(section, "n", 100));
    src.synth.d = static_cast<Eigen::Index>(cfg.get_int(section, "d", 10));
    src.synth.scenario = scenario_from_string(cfg.get_string(section, "scenario", "iid"));
    src.synth.n_significant =
        static_cast<Eigen::Index>(cfg.get_int(section, "n_significant", 30));
    src.synth.intercept = cfg.get_real(section, "intercept", 0.0);
    src.synth.seed = static_cast<std::uint64_t>(cfg.get_int(section, "data_seed", 1));
    src.subsample_seed =
        static_cast<std::uint64_t>(cfg.get_int(section, "subsample_seed", 1));

    const std::string prep = cfg.get_string(section, "preprocess", "none");
    if (prep != "none") {
        src.do_preprocess = true;
        src.prep.mode = preprocess_mode_from_string(prep);
        src.prep.sparsity_threshold = cfg.get_real(section, "sparsity_threshold", 0.85);
    }
    src.prep.add_intercept = cfg.get_bool(section, "add_intercept", false);
    src.do_preprocess = src.do_preprocess || src.prep.add_intercept;
    return src;
}

/// Load-and-preprocess a file source once (grid cells then subsample columns).
inline Dataset load_base_dataset(const DataSource& src) {
    Dataset base = src.kind == DataSource::Kind::Csv
                       ? load_csv(src.path, src.y_column)
                       : load_libsvm(src.path, src.libsvm_d);
    if (src.do_preprocess) return preprocess(base, src.prep).dataset;
    return base;
}

/// Per-cell synthetic design: the template spec at dimension d (prefix
/// scenarios keep at most d-1 significant columns; column 0 is the ones
/// column) with a replicate-shifted seed.
inline SyntheticData synthesize_cell(const DataSource& src, Eigen::Index d,
                                     std::uint64_t seed_offset) {
    SyntheticSpec spec = src.synth;
    spec.d = d;
    spec.seed = src.synth.seed + seed_offset;
    if (spec.scenario != SyntheticSpec::Scenario::IidNormal)
        spec.n_significant = std::min<Eigen::Index>(spec.n_significant, d - 1);
    SyntheticData data = generate_synthetic(spec);
    if (src.do_preprocess) {
        PreprocessSpec prep = src.prep;
        prep.add_intercept = false; // prefix scenarios already carry a ones column
        if (src.prep.add_intercept &&
            spec.scenario == SyntheticSpec::Scenario::IidNormal)
            prep.add_intercept = true;
        data.dataset = preprocess(data.dataset, prep).dataset;
    }
    return data;
}

/// Gaussian curvature surrogate for condition-number diagnostics: inverse of
/// the logistic information bound at the origin plus the prior precision,
///   Sigma_hat = (X^T X / 4 + I / prior_sd^2)^{-1}.
inline Eigen::MatrixXd curvature_surrogate(const Dataset& dataset, double prior_sd) {
    if (!(prior_sd > 0.0))
        throw std::invalid_argument("curvature_surrogate: prior_sd must be positive");
    const Eigen::Index d = dataset.d();
    Eigen::MatrixXd prec = dataset.X().transpose() * dataset.X() / 4.0;
    prec.diagonal().array() += 1.0 / (prior_sd * prior_sd);
    Eigen::MatrixXd sigma_hat =
        prec.llt().solve(Eigen::MatrixXd::Identity(d, d));
    return 0.5 * (sigma_hat + sigma_hat.transpose());
}

// ---------------------------------------------------------------------------
// run: one chain -> trace CSV + metadata JSON + ESS JSON
// ---------------------------------------------------------------------------

struct RunCommandResult {
    Trace trace;
    std::optional<EssReport> report;   ///< absent if ESS was not computable
    std::string ess_error;             ///< why, when absent
    std::vector<std::string> outputs;  ///< files written
};

inline RunCommandResult cmd_run(const Config& cfg) {
    const std::string section = "run";
    const DataSource src = data_source_from_config(cfg, section);
    Dataset dataset = src.kind == DataSource::Kind::Synthetic
                          ? synthesize_cell(src, src.synth.d, 0).dataset
                          : load_base_dataset(src);

    const GlmModel model = model_from_config(cfg, section);
    const RunConfig rc = run_config_from_config(cfg, section);
    Trace trace = run_chain(model, dataset, rc);

    RunCommandResult result;
    result.ess_error.clear();
    if (trace.valid && trace.kept() >= 4) {
        try {
            result.report = ess_report(trace.draws, trace.column_names, trace.seconds);
        } catch (const std::exception& e) {
            result.ess_error = e.what();
        }
    } else {
        result.ess_error = trace.valid ? "fewer than 4 kept draws"
                                       : "chain failed: " + trace.error;
    }

    const std::string prefix = cfg.get_string(section, "out_prefix", "run");
    const std::string trace_path = prefix + "_trace.csv";
    const std::string meta_path = prefix + "_meta.json";
    const std::string ess_path = prefix + "_ess.json";
    detail::ensure_parent_dir(trace_path);
    save_trace_csv(trace, trace_path);

    nlohmann::json meta = trace_metadata_json(trace);
    meta["command"] = "run";
    meta["config_hash"] = cfg.hash();
    meta["config"] = cfg.canonical();
    meta["dataset"] = {{"n", dataset.n()},
                       {"d", dataset.d()},
                       {"sparse", dataset.is_sparse()},
                       {"zero_fraction", dataset.zero_fraction()}};
    save_json(meta, meta_path);

    nlohmann::json ess_json;
    if (result.report.has_value()) {
        ess_json = ess_report_json(*result.report);
    } else {
        ess_json["error"] = result.ess_error;
    }
    ess_json["config_hash"] = cfg.hash();
    save_json(ess_json, ess_path);

    result.trace = std::move(trace);
    result.outputs = {trace_path, meta_path, ess_path};
    return result;
}

// ---------------------------------------------------------------------------
// sweep-scaling: cost-per-sweep vs dimension for cached and naive evaluation
// ---------------------------------------------------------------------------

struct SweepScalingRow {
    std::string mode;   ///< "cached" | "naive"
    Eigen::Index d = 0;
    int replicate = 0;
    double seconds_per_1000_sweeps = 0.0;
    std::uint64_t multiply_add_count = 0;  ///< core mul-adds over the whole run
};

struct SweepScalingResult {
    std::vector<SweepScalingRow> rows;
    double cached_slope = std::numeric_limits<double>::quiet_NaN();
    double naive_slope = std::numeric_limits<double>::quiet_NaN();
    bool slopes_defined = false;  ///< false on a single-point grid
    std::vector<std::string> cell_errors;
    std::vector<std::string> outputs;
};

inline SweepScalingResult cmd_sweep_scaling(const Config& cfg) {
    const std::string section = "sweep_scaling";
    const Eigen::Index n = static_cast<Eigen::Index>(cfg.get_int(section, "n", 100));
    const std::vector<long long> d_grid =
        cfg.get_grid(section, "d_grid", {16, 32, 64, 128, 256, 512});
    const int replicates = static_cast<int>(cfg.get_int(section, "replicates", 3));
    if (n < 1) throw std::invalid_argument("sweep_scaling: n must be >= 1");
    if (replicates < 1)
        throw std::invalid_argument("sweep_scaling: replicates must be >= 1");
    for (const long long d : d_grid)
        if (d < 1) throw std::invalid_argument("sweep_scaling: d grid must be positive");

    Config cell_cfg = cfg; // shared sampler settings; mode/seed set per cell
    cell_cfg.set(section + ".sweeps",
                 std::to_string(cfg.get_int(section, "sweeps", 200)));
    if (!cfg.has(section, "kernel")) cell_cfg.set(section + ".kernel", "mh");
    const GlmModel model = model_from_config(cfg, section);
    const std::uint64_t data_seed =
        static_cast<std::uint64_t>(cfg.get_int(section, "data_seed", 1));
    const std::uint64_t chain_seed =
        static_cast<std::uint64_t>(cfg.get_int(section, "seed", 1));

    const std::size_t cells = d_grid.size() * static_cast<std::size_t>(replicates);
    std::vector<std::vector<SweepScalingRow>> slots(cells);
    std::vector<std::string> errors(cells);

    run_cells(cells, [&](std::size_t idx) {
        const std::size_t gi = idx / static_cast<std::size_t>(replicates);
        const int rep = static_cast<int>(idx % static_cast<std::size_t>(replicates));
        const Eigen::Index d = static_cast<Eigen::Index>(d_grid[gi]);
        try {
            SyntheticSpec spec;
            spec.n = n;
            spec.d = d;
            spec.scenario = SyntheticSpec::Scenario::IidNormal;
            spec.intercept = cfg.get_real(section, "intercept", 0.0);
            spec.seed = data_seed + 7919u * static_cast<std::uint64_t>(rep) +
                        static_cast<std::uint64_t>(d);
            const Dataset dataset = generate_synthetic(spec).dataset;

            RunConfig rc = run_config_from_config(cell_cfg, section);
            rc.warmup = 0;
            rc.thin = 1;
            rc.seed = chain_seed + 104729u * static_cast<std::uint64_t>(rep) +
                      static_cast<std::uint64_t>(d);
            for (const EvalMode mode : {EvalMode::Cached, EvalMode::Naive}) {
                rc.eval_mode = mode;
                const Trace trace = run_chain(model, dataset, rc);
                if (!trace.valid)
                    throw std::runtime_error("chain failed: " + trace.error);
                SweepScalingRow row;
                row.mode = mode == EvalMode::Cached ? "cached" : "naive";
                row.d = d;
                row.replicate = rep;
                row.seconds_per_1000_sweeps =
                    trace.seconds / static_cast<double>(rc.sweeps) * 1000.0;
                row.multiply_add_count = trace.core_multiply_adds;
                slots[idx].push_back(row);
            }
        } catch (const std::exception& e) {
            errors[idx] = "d=" + std::to_string(d) + " rep=" + std::to_string(rep) +
                          ": " + e.what();
            slots[idx].clear();
        }
    });

    SweepScalingResult result;
    for (const auto& slot : slots)
        result.rows.insert(result.rows.end(), slot.begin(), slot.end());
    for (const auto& err : errors)
        if (!err.empty()) result.cell_errors.push_back(err);

    // Log-log slope of mean mul-adds per replicate against d, per mode.
    nlohmann::json per_mode = nlohmann::json::object();
    for (const std::string mode : {"cached", "naive"}) {
        std::vector<double> log_d, log_ops;
        nlohmann::json level_means = nlohmann::json::array();
        for (const long long d : d_grid) {
            double sum = 0.0;
            int count = 0;
            for (const auto& row : result.rows)
                if (row.mode == mode && row.d == d) {
                    sum += static_cast<double>(row.multiply_add_count);
                    ++count;
                }
            if (count == 0) continue;
            const double mean = sum / count;
            level_means.push_back({{"d", d}, {"mean_multiply_adds", mean}});
            if (mean > 0.0) {
                log_d.push_back(std::log(static_cast<double>(d)));
                log_ops.push_back(std::log(mean));
            }
        }
        double slope = std::numeric_limits<double>::quiet_NaN();
        if (log_d.size() >= 2) slope = detail::ols_slope_xy(log_d, log_ops);
        if (mode == std::string("cached"))
            result.cached_slope = slope;
        else
            result.naive_slope = slope;
        per_mode[mode] = {{"levels", level_means},
                          {"log_log_slope", slope},
                          {"slope_defined", log_d.size() >= 2}};
    }
    result.slopes_defined =
        !std::isnan(result.cached_slope) && !std::isnan(result.naive_slope);

    const std::string prefix = cfg.get_string(section, "out_prefix", "sweep_scaling");
    const std::string csv_path = prefix + ".csv";
    const std::string json_path = prefix + ".json";
    detail::CsvWriter csv(csv_path,
                          {"mode", "d", "replicate", "seconds_per_1000_sweeps",
                           "multiply_add_count"},
                          cfg.hash());
    for (const auto& row : result.rows)
        csv.row({row.mode, detail::fmt_int(row.d), detail::fmt_int(row.replicate),
                 detail::format_double17(row.seconds_per_1000_sweeps),
                 std::to_string(row.multiply_add_count)});

    nlohmann::json summary = {{"command", "sweep_scaling"},
                              {"config_hash", cfg.hash()},
                              {"modes", per_mode},
                              {"slopes_defined", result.slopes_defined},
                              {"errors", result.cell_errors}};
    if (!result.slopes_defined)
        summary["note"] = "slope undefined: fewer than two usable grid levels";
    save_json(summary, json_path);
    result.outputs = {csv_path, json_path};
    return result;
}

// ---------------------------------------------------------------------------
// ess-scaling: sweeps per effective sample vs dimension
// ---------------------------------------------------------------------------

struct EssScalingRow {
    Eigen::Index d = 0;
    int replicate = 0;
    Eigen::Index t_kept = 0;
    double min_ess = 0.0;
    double median_ess = 0.0;
    double sweeps_per_median_ess = 0.0;
    double sweeps_per_min_ess = 0.0;
    double seconds_per_median_ess = 0.0;
    bool unreliable = false;
};

struct EssScalingLevel {
    Eigen::Index d = 0;
    double median_sweeps_per_median_ess = 0.0;
    double median_sweeps_per_min_ess = 0.0;
};

struct EssScalingResult {
    std::vector<EssScalingRow> rows;
    std::vector<EssScalingLevel> levels;  ///< replicate medians per grid level
    double tail_slope = std::numeric_limits<double>::quiet_NaN();
    bool tail_slope_defined = false;  ///< needs >= 3 usable grid levels
    std::vector<std::string> cell_errors;
    std::vector<std::string> outputs;
};

/// Shared grid driver for ess-scaling and irrelevant-features: one chain per
/// (d, replicate) cell, summarised by its ESS report.
inline void run_ess_grid(const Config& cfg, const std::string& section,
                         const DataSource& src, const std::vector<long long>& d_grid,
                         int replicates, std::vector<EssScalingRow>& rows,
                         std::vector<std::string>& cell_errors) {
    if (replicates < 1)
        throw std::invalid_argument(section + ": replicates must be >= 1");
    for (const long long d : d_grid)
        if (d < 1) throw std::invalid_argument(section + ": d grid must be positive");

    std::optional<Dataset> base;
    if (src.kind != DataSource::Kind::Synthetic) {
        base = load_base_dataset(src);
        for (const long long d : d_grid)
            if (d > base->d())
                throw std::invalid_argument(
                    section + ": d grid exceeds dataset feature count " +
                    std::to_string(base->d()));
    }

    const GlmModel model = model_from_config(cfg, section);
    const RunConfig rc_template = run_config_from_config(cfg, section);
    const std::uint64_t chain_seed =
        static_cast<std::uint64_t>(cfg.get_int(section, "seed", 1));

    const std::size_t cells = d_grid.size() * static_cast<std::size_t>(replicates);
    std::vector<std::optional<EssScalingRow>> slots(cells);
    std::vector<std::string> errors(cells);

    run_cells(cells, [&](std::size_t idx) {
        const std::size_t gi = idx / static_cast<std::size_t>(replicates);
        const int rep = static_cast<int>(idx % static_cast<std::size_t>(replicates));
        const Eigen::Index d = static_cast<Eigen::Index>(d_grid[gi]);
        try {
            Dataset dataset =
                src.kind == DataSource::Kind::Synthetic
                    ? synthesize_cell(src, d, static_cast<std::uint64_t>(rep)).dataset
                    : subsample_features(*base, d,
                                         src.subsample_seed +
                                             static_cast<std::uint64_t>(rep));
            RunConfig rc = rc_template;
            rc.seed = chain_seed + 104729u * static_cast<std::uint64_t>(rep) +
                      static_cast<std::uint64_t>(d);
            const Trace trace = run_chain(model, dataset, rc);
            if (!trace.valid) throw std::runtime_error("chain failed: " + trace.error);
            const EssReport report =
                ess_report(trace.draws, trace.column_names, trace.seconds);
            EssScalingRow row;
            row.d = d;
            row.replicate = rep;
            row.t_kept = report.t_kept;
            row.min_ess = report.min_ess;
            row.median_ess = report.median_ess;
            row.sweeps_per_median_ess = report.sweeps_per_ess;
            row.sweeps_per_min_ess =
                static_cast<double>(report.t_kept) / report.min_ess;
            row.seconds_per_median_ess = report.seconds_per_ess;
            row.unreliable = report.unreliable;
            slots[idx] = row;
        } catch (const std::exception& e) {
            errors[idx] = "d=" + std::to_string(d) + " rep=" + std::to_string(rep) +
                          ": " + e.what();
        }
    });

    for (const auto& slot : slots)
        if (slot.has_value()) rows.push_back(*slot);
    for (const auto& err : errors)
        if (!err.empty()) cell_errors.push_back(err);
}

inline std::vector<EssScalingLevel> aggregate_ess_levels(
    const std::vector<long long>& d_grid, const std::vector<EssScalingRow>& rows) {
    std::vector<EssScalingLevel> levels;
    for (const long long d : d_grid) {
        std::vector<double> per_median, per_min;
        for (const auto& row : rows)
            if (row.d == d) {
                per_median.push_back(row.sweeps_per_median_ess);
                per_min.push_back(row.sweeps_per_min_ess);
            }
        if (per_median.empty()) continue;
        EssScalingLevel level;
        level.d = static_cast<Eigen::Index>(d);
        level.median_sweeps_per_median_ess = detail::median_of(per_median);
        level.median_sweeps_per_min_ess = detail::median_of(per_min);
        levels.push_back(level);
    }
    return levels;
}

inline EssScalingResult cmd_ess_scaling(const Config& cfg) {
    const std::string section = "ess_scaling";
    Config defaults = cfg;
    if (!cfg.has(section, "n")) defaults.set(section + ".n", "32");
    if (!cfg.has(section, "scenario")) defaults.set(section + ".scenario", "1");
    if (!cfg.has(section, "sweeps")) defaults.set(section + ".sweeps", "3000");
    if (!cfg.has(section, "warmup")) defaults.set(section + ".warmup", "1000");

    const DataSource src = data_source_from_config(defaults, section);
    const std::vector<long long> d_grid =
        defaults.get_grid(section, "d_grid", {4, 8, 16, 32, 64, 128, 256, 512});
    const int replicates = static_cast<int>(defaults.get_int(section, "replicates", 3));

    EssScalingResult result;
    run_ess_grid(defaults, section, src, d_grid, replicates, result.rows,
                 result.cell_errors);
    result.levels = aggregate_ess_levels(d_grid, result.rows);

    // Tail slope: log sweeps-per-median-ESS against log d over the last three
    // usable grid levels; near-zero slope means the cost per effective sample
    // has stopped growing with dimension.
    if (result.levels.size() >= 3) {
        std::vector<double> xs, ys;
        for (std::size_t i = result.levels.size() - 3; i < result.levels.size(); ++i) {
            xs.push_back(std::log(static_cast<double>(result.levels[i].d)));
            ys.push_back(std::log(result.levels[i].median_sweeps_per_median_ess));
        }
        result.tail_slope = detail::ols_slope_xy(xs, ys);
        result.tail_slope_defined = true;
    }

    const std::string prefix = cfg.get_string(section, "out_prefix", "ess_scaling");
    const std::string csv_path = prefix + ".csv";
    const std::string json_path = prefix + ".json";
    detail::CsvWriter csv(
        csv_path,
        {"d", "replicate", "t_kept", "min_ess", "median_ess", "sweeps_per_median_ess",
         "sweeps_per_min_ess", "seconds_per_median_ess", "unreliable"},
        cfg.hash());
    for (const auto& row : result.rows)
        csv.row({detail::fmt_int(row.d), detail::fmt_int(row.replicate),
                 detail::fmt_int(row.t_kept), detail::format_double17(row.min_ess),
                 detail::format_double17(row.median_ess),
                 detail::format_double17(row.sweeps_per_median_ess),
                 detail::format_double17(row.sweeps_per_min_ess),
                 detail::format_double17(row.seconds_per_median_ess),
                 row.unreliable ? "1" : "0"});

    nlohmann::json levels_json = nlohmann::json::array();
    for (const auto& level : result.levels)
        levels_json.push_back(
            {{"d", level.d},
             {"median_sweeps_per_median_ess", level.median_sweeps_per_median_ess},
             {"median_sweeps_per_min_ess", level.median_sweeps_per_min_ess}});
    nlohmann::json summary = {{"command", "ess_scaling"},
                              {"config_hash", cfg.hash()},
                              {"levels", levels_json},
                              {"tail_slope", result.tail_slope},
                              {"tail_slope_defined", result.tail_slope_defined},
                              {"errors", result.cell_errors}};

    // Optional: summarise an externally produced trace with the same ESS rules.
    const std::string external = cfg.get_string(section, "external_trace", "");
    if (!external.empty()) {
        const LoadedTrace loaded = load_trace_csv(external);
        const EssReport report =
            ess_report(loaded.draws, loaded.column_names,
                       cfg.get_real(section, "external_seconds", 0.0));
        summary["external"] = ess_report_json(report);
        summary["external"]["path"] = external;
    }
    save_json(summary, json_path);
    result.outputs = {csv_path, json_path};
    return result;
}

// ---------------------------------------------------------------------------
// irrelevant-features: tail-structure contrast on the prefix scenarios
// ---------------------------------------------------------------------------

struct IrrelevantFeaturesResult {
    std::string scenario;
    std::vector<EssScalingRow> rows;
    std::vector<EssScalingLevel> levels;
    /// Directional contrast between the first and last grid levels.
    bool median_rate_improves = false;      ///< sweeps/median-ESS went down
    bool min_rate_not_improved = false;     ///< sweeps/min-ESS did not go down
    bool contrast_defined = false;          ///< needs >= 2 usable levels
    std::vector<std::string> cell_errors;
    std::vector<std::string> outputs;
};

inline IrrelevantFeaturesResult cmd_irrelevant_features(const Config& cfg) {
    const std::string section = "irrelevant_features";
    Config defaults = cfg;
    if (!cfg.has(section, "scenario")) defaults.set(section + ".scenario", "3");
    if (!cfg.has(section, "n")) defaults.set(section + ".n", "100");
    if (!cfg.has(section, "sweeps")) defaults.set(section + ".sweeps", "2000");
    if (!cfg.has(section, "warmup")) defaults.set(section + ".warmup", "500");

    const DataSource src = data_source_from_config(defaults, section);
    if (src.kind != DataSource::Kind::Synthetic)
        throw std::invalid_argument(
            "irrelevant_features: only synthetic prefix scenarios are supported");
    if (src.synth.scenario == SyntheticSpec::Scenario::IidNormal)
        throw std::invalid_argument(
            "irrelevant_features: scenario must be one of the prefix designs (1|2|3)");
    const std::vector<long long> d_grid =
        defaults.get_grid(section, "d_grid", {32, 64, 128, 256});
    for (const long long d : d_grid)
        if (d < src.synth.n_significant)
            throw std::invalid_argument(
                "irrelevant_features: grid dimension " + std::to_string(d) +
                " is smaller than n_significant = " +
                std::to_string(src.synth.n_significant));
    const int replicates = static_cast<int>(defaults.get_int(section, "replicates", 3));

    IrrelevantFeaturesResult result;
    result.scenario = defaults.get_string(section, "scenario", "3");
    run_ess_grid(defaults, section, src, d_grid, replicates, result.rows,
                 result.cell_errors);
    result.levels = aggregate_ess_levels(d_grid, result.rows);

    if (result.levels.size() >= 2) {
        const EssScalingLevel& first = result.levels.front();
        const EssScalingLevel& last = result.levels.back();
        result.contrast_defined = true;
        result.median_rate_improves =
            last.median_sweeps_per_median_ess < first.median_sweeps_per_median_ess;
        // 10% slack absorbs replicate noise in the per-min rate.
        result.min_rate_not_improved =
            last.median_sweeps_per_min_ess >=
            0.9 * first.median_sweeps_per_min_ess;
    }

    const std::string prefix =
        cfg.get_string(section, "out_prefix", "irrelevant_features");
    const std::string csv_path = prefix + ".csv";
    const std::string json_path = prefix + ".json";
    detail::CsvWriter csv(
        csv_path,
        {"scenario", "d", "replicate", "t_kept", "min_ess", "median_ess",
         "sweeps_per_median_ess", "sweeps_per_min_ess", "unreliable"},
        cfg.hash());
    for (const auto& row : result.rows)
        csv.row({result.scenario, detail::fmt_int(row.d),
                 detail::fmt_int(row.replicate), detail::fmt_int(row.t_kept),
                 detail::format_double17(row.min_ess),
                 detail::format_double17(row.median_ess),
                 detail::format_double17(row.sweeps_per_median_ess),
                 detail::format_double17(row.sweeps_per_min_ess),
                 row.unreliable ? "1" : "0"});

    nlohmann::json levels_json = nlohmann::json::array();
    for (const auto& level : result.levels)
        levels_json.push_back(
            {{"d", level.d},
             {"median_sweeps_per_median_ess", level.median_sweeps_per_median_ess},
             {"median_sweeps_per_min_ess", level.median_sweeps_per_min_ess}});
    const nlohmann::json summary = {
        {"command", "irrelevant_features"},
        {"config_hash", cfg.hash()},
        {"scenario", result.scenario},
        {"levels", levels_json},
        {"contrast_defined", result.contrast_defined},
        {"median_rate_improves", result.median_rate_improves},
        {"min_rate_not_improved", result.min_rate_not_improved},
        {"errors", result.cell_errors}};
    save_json(summary, json_path);
    result.outputs = {csv_path, json_path};
    return result;
}

// ---------------------------------------------------------------------------
// cond-scaling: condition numbers of the curvature surrogate vs dimension
// ---------------------------------------------------------------------------

struct CondScalingRow {
    Eigen::Index d = 0;
    int replicate = 0;
    double kappa = 0.0;
    double kappa_cor = 0.0;
    double kappa_r_upper = 0.0;
};

struct CondScalingResult {
    std::vector<CondScalingRow> rows;
    std::vector<std::string> cell_errors;
    std::vector<std::string> outputs;
};

inline CondScalingResult cmd_cond_scaling(const Config& cfg) {
    const std::string section = "cond_scaling";
    Config defaults = cfg;
    if (!cfg.has(section, "n")) defaults.set(section + ".n", "32");

    const DataSource src = data_source_from_config(defaults, section);
    const std::vector<long long> d_grid =
        defaults.get_grid(section, "d_grid", {2, 4, 8, 16, 32, 64, 128, 256});
    const int replicates = static_cast<int>(defaults.get_int(section, "replicates", 1));
    if (replicates < 1)
        throw std::invalid_argument("cond_scaling: replicates must be >= 1");
    for (const long long d : d_grid)
        if (d < 1) throw std::invalid_argument("cond_scaling: d grid must be positive");
    const double prior_sd = defaults.get_real(section, "prior_sd", 10.0);
    const int budget = static_cast<int>(defaults.get_int(section, "budget", 200));
    const std::uint64_t kappa_seed =
        static_cast<std::uint64_t>(defaults.get_int(section, "kappa_seed", 7));

    std::optional<Dataset> base;
    if (src.kind != DataSource::Kind::Synthetic) {
        base = load_base_dataset(src);
        for (const long long d : d_grid)
            if (d > base->d())
                throw std::invalid_argument(
                    "cond_scaling: d grid exceeds dataset feature count " +
                    std::to_string(base->d()));
    }

    const std::size_t cells = d_grid.size() * static_cast<std::size_t>(replicates);
    std::vector<std::optional<CondScalingRow>> slots(cells);
    std::vector<std::string> errors(cells);

    run_cells(cells, [&](std::size_t idx) {
        const std::size_t gi = idx / static_cast<std::size_t>(replicates);
        const int rep = static_cast<int>(idx % static_cast<std::size_t>(replicates));
        const Eigen::Index d = static_cast<Eigen::Index>(d_grid[gi]);
        try {
            Dataset dataset =
                src.kind == DataSource::Kind::Synthetic
                    ? synthesize_cell(src, d, static_cast<std::uint64_t>(rep)).dataset
                    : subsample_features(*base, d,
                                         src.subsample_seed +
                                             static_cast<std::uint64_t>(rep));
            const Eigen::MatrixXd sigma_hat = curvature_surrogate(dataset, prior_sd);
            CondScalingRow row;
            row.d = d;
            row.replicate = rep;
            row.kappa = kappa(sigma_hat);
            row.kappa_cor = kappa_cor(sigma_hat);
            row.kappa_r_upper =
                kappa_r_search(sigma_hat, budget,
                               kappa_seed + static_cast<std::uint64_t>(idx))
                    .value;
            slots[idx] = row;
        } catch (const std::exception& e) {
            errors[idx] = "d=" + std::to_string(d) + " rep=" + std::to_string(rep) +
                          ": " + e.what();
        }
    });

    CondScalingResult result;
    for (const auto& slot : slots)
        if (slot.has_value()) result.rows.push_back(*slot);
    for (const auto& err : errors)
        if (!err.empty()) result.cell_errors.push_back(err);

    const std::string prefix = cfg.get_string(section, "out_prefix", "cond_scaling");
    const std::string csv_path = prefix + ".csv";
    const std::string json_path = prefix + ".json";
    detail::CsvWriter csv(csv_path,
                          {"d", "replicate", "kappa", "kappa_cor", "kappa_r_upper"},
                          cfg.hash());
    for (const auto& row : result.rows)
        csv.row({detail::fmt_int(row.d), detail::fmt_int(row.replicate),
                 detail::format_double17(row.kappa),
                 detail::format_double17(row.kappa_cor),
                 detail::format_double17(row.kappa_r_upper)});

    nlohmann::json levels = nlohmann::json::array();
    for (const long long d : d_grid) {
        std::vector<double> ks, kcs, krs;
        for (const auto& row : result.rows)
            if (row.d == d) {
                ks.push_back(row.kappa);
                kcs.push_back(row.kappa_cor);
                krs.push_back(row.kappa_r_upper);
            }
        if (ks.empty()) continue;
        levels.push_back({{"d", d},
                          {"median_kappa", detail::median_of(ks)},
                          {"median_kappa_cor", detail::median_of(kcs)},
                          {"median_kappa_r_upper", detail::median_of(krs)}});
    }
    const nlohmann::json summary = {{"command", "cond_scaling"},
                                    {"config_hash", cfg.hash()},
                                    {"levels", levels},
                                    {"errors", result.cell_errors}};
    save_json(summary, json_path);
    result.outputs = {csv_path, json_path};
    return result;
}

// ---------------------------------------------------------------------------
// theory-check: randomised verification of the Gaussian sweep-rate results
// ---------------------------------------------------------------------------

struct TheoryCheckInstance {
    Eigen::Index d = 0;
    double kappa = 0.0;
    double kappa_cor = 0.0;
    double kappa_r = 0.0;
    double rho = 0.0;
    double rate_bound = 0.0;   ///< exp(-1/kappa)
    bool holds = false;        ///< rho <= bound + tol
    bool slope_checked = false;
    double slope = std::numeric_limits<double>::quiet_NaN();
    bool slope_ok = true;
};

struct TheoryCheckResult {
    std::vector<TheoryCheckInstance> instances;
    bool all_hold = false;
    bool all_slopes_ok = false;
    bool all_pass = false;
    double max_bound_violation = 0.0;   ///< max over instances of rho - bound
    double max_slope_rel_dev = 0.0;
    std::vector<std::string> outputs;
};

inline TheoryCheckResult cmd_theory_check(const Config& cfg) {
    const std::string section = "theory_check";
    const long long instances = cfg.get_int(section, "instances", 200);
    const long long d_min = cfg.get_int(section, "d_min", 2);
    const long long d_max = cfg.get_int(section, "d_max", 10);
    if (instances < 1)
        throw std::invalid_argument("theory_check: empty suite (instances must be >= 1)");
    if (d_min < 1 || d_max < d_min)
        throw std::invalid_argument("theory_check: need 1 <= d_min <= d_max");
    const std::uint64_t seed = static_cast<std::uint64_t>(cfg.get_int(section, "seed", 1));
    const double tol = cfg.get_real(section, "tol", 1e-12);
    const double rho_threshold = cfg.get_real(section, "rho_threshold", 0.1);
    const double slope_rtol = cfg.get_real(section, "slope_rtol", 0.02);
    const double decay_floor = cfg.get_real(section, "decay_floor", 1e-9);
    const int kappa_budget = static_cast<int>(cfg.get_int(section, "kappa_budget", 400));

    const std::size_t count = static_cast<std::size_t>(instances);
    std::vector<std::optional<TheoryCheckInstance>> slots(count);
    std::vector<std::string> errors(count);

    run_cells(count, [&](std::size_t idx) {
        try {
            RngStream rng(seed, static_cast<std::uint64_t>(idx));
            const Eigen::Index d =
                d_min + static_cast<Eigen::Index>(
                            rng.uniform_index(static_cast<std::uint64_t>(d_max - d_min + 1)));
            const Eigen::MatrixXd q = random_m_matrix_precision(d, rng);
            Eigen::MatrixXd sigma =
                q.llt().solve(Eigen::MatrixXd::Identity(d, d));
            sigma = 0.5 * (sigma + sigma.transpose()).eval();

            const RateBoundCheck check = rate_bound_check(sigma, tol);
            TheoryCheckInstance inst;
            inst.d = d;
            inst.kappa = check.kappa;
            inst.kappa_cor = kappa_cor(sigma);
            inst.kappa_r = kappa_r(sigma, kappa_budget,
                                   seed + 31u * static_cast<std::uint64_t>(idx));
            inst.rho = check.rho;
            inst.rate_bound = check.bound;
            inst.holds = check.holds;

            if (check.rho > rho_threshold) {
                const GaussianTarget target(Eigen::VectorXd::Zero(d), sigma);
                const Eigen::VectorXd mu0 = Eigen::VectorXd::Ones(d);
                const Eigen::MatrixXd sigma0 = Eigen::MatrixXd::Zero(d, d);
                const double w0 = gaussian_w2(mu0, sigma0, target.mu(), target.sigma());
                // The W2 trace formula cancels to ~1e-7 relative accuracy, so
                // keep the fit window above that numerical noise floor.
                const double fit_floor = std::max(decay_floor, 1e-6 * w0);
                const double log_rho = std::log(check.rho);
                std::uint64_t t_max = static_cast<std::uint64_t>(
                    std::ceil((std::log(fit_floor) - std::log(w0)) / log_rho)) + 8;
                t_max = std::min<std::uint64_t>(std::max<std::uint64_t>(t_max, 16), 4000);
                const std::vector<double> curve = divergence_decay_curve(
                    target, mu0, sigma0, DivergenceKind::W2, t_max);
                const std::size_t skip =
                    std::max<std::size_t>(2, curve.size() / 10);
                inst.slope = log_decay_slope(curve, skip, fit_floor);
                inst.slope_checked = true;
                inst.slope_ok =
                    std::abs(inst.slope - log_rho) <= slope_rtol * std::abs(log_rho);
            }
            slots[idx] = inst;
        } catch (const std::exception& e) {
            errors[idx] = "instance " + std::to_string(idx) + ": " + e.what();
        }
    });

    TheoryCheckResult result;
    std::vector<std::string> cell_errors;
    for (const auto& err : errors)
        if (!err.empty()) cell_errors.push_back(err);
    result.all_hold = cell_errors.empty();
    result.all_slopes_ok = true;
    nlohmann::json instances_json = nlohmann::json::array();
    for (const auto& slot : slots) {
        if (!slot.has_value()) continue;
        const TheoryCheckInstance& inst = *slot;
        result.instances.push_back(inst);
        result.all_hold = result.all_hold && inst.holds;
        result.max_bound_violation =
            std::max(result.max_bound_violation, inst.rho - inst.rate_bound);
        if (inst.slope_checked) {
            result.all_slopes_ok = result.all_slopes_ok && inst.slope_ok;
            result.max_slope_rel_dev = std::max(
                result.max_slope_rel_dev,
                std::abs(inst.slope - std::log(inst.rho)) / std::abs(std::log(inst.rho)));
        }
        nlohmann::json j = {{"d", inst.d},
                            {"kappa", inst.kappa},
                            {"kappa_cor", inst.kappa_cor},
                            {"kappa_r", inst.kappa_r},
                            {"rho", inst.rho},
                            {"lemma_bound", inst.rate_bound},
                            {"holds", inst.holds}};
        if (inst.slope_checked) {
            j["w2_decay_slope"] = inst.slope;
            j["slope_ok"] = inst.slope_ok;
        }
        instances_json.push_back(j);
    }
    result.all_pass = result.all_hold && result.all_slopes_ok;

    const std::string prefix = cfg.get_string(section, "out_prefix", "theory_check");
    const std::string json_path = prefix + ".json";
    std::size_t slope_checked_count = 0;
    for (const auto& inst : result.instances)
        if (inst.slope_checked) ++slope_checked_count;
    const nlohmann::json report = {
        {"command", "theory_check"},
        {"config_hash", cfg.hash()},
        {"instances", instances_json},
        {"summary",
         {{"count", result.instances.size()},
          {"all_hold", result.all_hold},
          {"slope_checked_count", slope_checked_count},
          {"all_slopes_ok", result.all_slopes_ok},
          {"all_pass", result.all_pass},
          {"max_bound_violation", result.max_bound_violation},
          {"max_slope_rel_dev", result.max_slope_rel_dev},
          {"errors", cell_errors}}}};
    detail::ensure_parent_dir(json_path);
    save_json(report, json_path);
    result.outputs = {json_path};
    return result;
}

} // namespace cggibbs

#endif
