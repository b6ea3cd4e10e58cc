#ifndef CGGIBBS_TRACE_IO_HPP
#define CGGIBBS_TRACE_IO_HPP

#include <cmath>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <json.hpp>

#include "cggibbs/chain.hpp"
#include "cggibbs/data_io.hpp"
#include "cggibbs/ess.hpp"

namespace cggibbs {

/// One row per kept sweep, one column per recorded coordinate; 17
/// significant digits for exact round-trips.
inline void save_trace_csv(const Trace& trace, const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("save_trace_csv: cannot open " + path + " for writing");
    for (std::size_t c = 0; c < trace.column_names.size(); ++c)
        out << (c ? "," : "") << trace.column_names[c];
    out << '\n';
    for (Eigen::Index i = 0; i < trace.draws.rows(); ++i) {
        for (Eigen::Index j = 0; j < trace.draws.cols(); ++j)
            out << (j ? "," : "") << detail::format_double17(trace.draws(i, j));
        out << '\n';
    }
    if (!out) throw std::runtime_error("save_trace_csv: write failure on " + path);
}

/// Numeric matrix CSV with a header row; the ingestion path for traces
/// produced by other samplers.
struct LoadedTrace {
    std::vector<std::string> column_names;
    Eigen::MatrixXd draws;
};

inline LoadedTrace load_trace_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_trace_csv: cannot open " + path);
    std::string line;
    if (!std::getline(in, line))
        throw std::runtime_error("load_trace_csv: " + path + " is empty");
    LoadedTrace out;
    out.column_names = detail::split_csv_line(detail::strip_cr(line));
    const std::size_t width = out.column_names.size();
    if (width == 0) throw std::runtime_error("load_trace_csv: empty header in " + path);

    std::vector<double> values;
    std::size_t rows = 0, line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        line = detail::strip_cr(line);
        if (line.empty()) continue;
        const std::string where = path + ":" + std::to_string(line_no);
        const std::vector<std::string> fields = detail::split_csv_line(line);
        if (fields.size() != width)
            throw std::runtime_error(where + ": expected " + std::to_string(width) +
                                     " fields, got " + std::to_string(fields.size()));
        for (const std::string& f : fields)
            values.push_back(detail::parse_double(f, where));
        ++rows;
    }
    if (rows == 0) throw std::runtime_error("load_trace_csv: no data rows in " + path);
    out.draws.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(width));
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < width; ++j)
            out.draws(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                values[i * width + j];
    return out;
}

inline nlohmann::json trace_metadata_json(const Trace& trace) {
    nlohmann::json j;
    j["columns"] = trace.column_names;
    j["kept"] = trace.kept();
    j["sweeps"] = trace.sweeps;
    j["warmup"] = trace.warmup;
    j["thin"] = trace.thin;
    j["seed"] = trace.seed;
    j["core_multiply_adds"] = trace.core_multiply_adds;
    j["target_evals"] = trace.target_evals;
    j["mh_proposals"] = trace.mh_proposals;
    j["mh_accepts"] = trace.mh_accepts;
    j["cache_refreshes"] = trace.cache_refreshes;
    j["seconds"] = trace.seconds;
    j["valid"] = trace.valid;
    if (!trace.valid) j["error"] = trace.error;
    return j;
}

inline nlohmann::json ess_report_json(const EssReport& report) {
    nlohmann::json j;
    nlohmann::json per_fn = nlohmann::json::object();
    // Degenerate (NaN) entries are stored as explicit JSON nulls rather than
    // relying on the serializer's NaN handling.
    const auto null_if_nan = [](double v) {
        return std::isnan(v) ? nlohmann::json() : nlohmann::json(v);
    };
    for (Eigen::Index c = 0; c < report.ess_identity.size(); ++c) {
        const std::string name =
            report.columns.empty() ? "column_" + std::to_string(c)
                                   : report.columns[static_cast<std::size_t>(c)];
        per_fn[name] = null_if_nan(report.ess_identity[c]);
        per_fn[name + "_sq"] = null_if_nan(report.ess_square[c]);
    }
    j["per_function_ess"] = per_fn;
    j["min_ess"] = report.min_ess;
    j["median_ess"] = report.median_ess;
    j["sweeps_per_ess"] = report.sweeps_per_ess;
    j["seconds_per_ess"] = report.seconds_per_ess;
    j["t_kept"] = report.t_kept;
    j["unreliable"] = report.unreliable;
    j["warnings"] = report.warnings;
    return j;
}

inline void save_json(const nlohmann::json& j, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("save_json: cannot open " + path + " for writing");
    out << j.dump(2) << '\n';
    if (!out) throw std::runtime_error("save_json: write failure on " + path);
}

} // namespace cggibbs

#endif
