#ifndef CGGIBBS_DATA_IO_HPP
#define CGGIBBS_DATA_IO_HPP

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "cggibbs/dataset.hpp"
#include "cggibbs/model.hpp"
#include "cggibbs/rng.hpp"

namespace cggibbs {

/// Name marking an all-ones intercept column; preprocessing never rescales a
/// column carrying this name.
inline constexpr const char* kInterceptName = "intercept";

namespace detail {

inline std::string format_double17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
}

inline double parse_double(const std::string& token, const std::string& where) {
    try {
        std::size_t used = 0;
        const double v = std::stod(token, &used);
        while (used < token.size() &&
               std::isspace(static_cast<unsigned char>(token[used])))
            ++used;
        if (used != token.size())
            throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw std::runtime_error(where + ": cannot parse number '" + token + "'");
    }
}

inline double coerce_binary_label(double v, const std::string& where) {
    if (v == 0.0 || v == 1.0) return v;
    if (v == -1.0) return 0.0; // common on-disk convention for the negative class
    throw std::runtime_error(where + ": non-binary label " + format_double17(v));
}

inline std::string strip_cr(std::string line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return line;
}

} // namespace detail

/// Load a header-ful CSV whose `y_column` holds binary responses; all other
/// columns become features in file order.
inline Dataset load_csv(const std::string& path, const std::string& y_column = "y") {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_csv: cannot open " + path);

    std::string line;
    if (!std::getline(in, line))
        throw std::runtime_error("load_csv: " + path + " is empty");
    const std::vector<std::string> header = detail::split_csv_line(detail::strip_cr(line));
    std::ptrdiff_t y_index = -1;
    std::vector<std::string> names;
    for (std::size_t c = 0; c < header.size(); ++c) {
        if (header[c] == y_column) {
            if (y_index >= 0)
                throw std::runtime_error("load_csv: duplicate label column '" +
                                         y_column + "' in " + path);
            y_index = static_cast<std::ptrdiff_t>(c);
        } else {
            names.push_back(header[c]);
        }
    }
    if (y_index < 0)
        throw std::runtime_error("load_csv: label column '" + y_column +
                                 "' not found in " + path);
    const std::size_t n_fields = header.size();
    if (n_fields < 2)
        throw std::runtime_error("load_csv: need at least one feature column in " + path);

    std::vector<std::vector<double>> rows;
    std::vector<double> labels;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        line = detail::strip_cr(line);
        if (line.empty()) continue;
        const std::string where = path + ":" + std::to_string(line_no);
        const std::vector<std::string> fields = detail::split_csv_line(line);
        if (fields.size() != n_fields)
            throw std::runtime_error(where + ": expected " + std::to_string(n_fields) +
                                     " fields, got " + std::to_string(fields.size()));
        std::vector<double> row;
        row.reserve(n_fields - 1);
        for (std::size_t c = 0; c < n_fields; ++c) {
            const double v = detail::parse_double(fields[c], where);
            if (static_cast<std::ptrdiff_t>(c) == y_index)
                labels.push_back(detail::coerce_binary_label(v, where));
            else
                row.push_back(v);
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw std::runtime_error("load_csv: no data rows in " + path);

    Eigen::MatrixXd x(static_cast<Eigen::Index>(rows.size()),
                      static_cast<Eigen::Index>(n_fields - 1));
    Eigen::VectorXd y(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        y[static_cast<Eigen::Index>(i)] = labels[i];
        for (std::size_t c = 0; c + 1 < n_fields; ++c)
            x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = rows[i][c];
    }
    return Dataset(std::move(x), std::move(y), std::move(names));
}

/// Load a libsvm-format file ("label idx:val idx:val ..."), indices 1-based
/// on disk and 0-based in memory. `d` overrides the inferred feature count
/// (pass 0 to use the largest index seen).
inline Dataset load_libsvm(const std::string& path, Eigen::Index d = 0) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_libsvm: cannot open " + path);

    struct Entry {
        Eigen::Index row, col;
        double value;
    };
    std::vector<Entry> entries;
    std::vector<double> labels;
    Eigen::Index max_index = 0;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        line = detail::strip_cr(line);
        if (line.empty()) continue;
        const std::string where = path + ":" + std::to_string(line_no);
        std::stringstream ss(line);
        std::string token;
        if (!(ss >> token)) continue;
        labels.push_back(
            detail::coerce_binary_label(detail::parse_double(token, where), where));
        const Eigen::Index row = static_cast<Eigen::Index>(labels.size()) - 1;
        while (ss >> token) {
            const std::size_t colon = token.find(':');
            if (colon == std::string::npos || colon == 0 || colon + 1 == token.size())
                throw std::runtime_error(where + ": malformed index:value pair '" +
                                         token + "'");
            const double idx_raw =
                detail::parse_double(token.substr(0, colon), where);
            const Eigen::Index idx = static_cast<Eigen::Index>(idx_raw);
            if (static_cast<double>(idx) != idx_raw || idx < 1)
                throw std::runtime_error(where + ": feature index must be a positive integer");
            const double value = detail::parse_double(token.substr(colon + 1), where);
            entries.push_back(Entry{row, idx - 1, value});
            max_index = std::max(max_index, idx);
        }
    }
    if (labels.empty()) throw std::runtime_error("load_libsvm: no data rows in " + path);
    if (d == 0) d = max_index;
    if (max_index > d)
        throw std::runtime_error("load_libsvm: feature index " +
                                 std::to_string(max_index) + " exceeds declared d=" +
                                 std::to_string(d) + " in " + path);
    if (d < 1) throw std::runtime_error("load_libsvm: no features found in " + path);

    Eigen::MatrixXd x =
        Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(labels.size()), d);
    for (const Entry& e : entries) x(e.row, e.col) = e.value;
    Eigen::VectorXd y(static_cast<Eigen::Index>(labels.size()));
    for (std::size_t i = 0; i < labels.size(); ++i)
        y[static_cast<Eigen::Index>(i)] = labels[i];
    return Dataset(std::move(x), std::move(y));
}

/// Write features plus a final label column; 17 significant digits so that
/// save-then-load round-trips exactly.
inline void save_csv(const Dataset& dataset, const std::string& path,
                     const std::string& y_column = "y") {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("save_csv: cannot open " + path + " for writing");
    for (Eigen::Index j = 0; j < dataset.d(); ++j) {
        out << (dataset.feature_names().empty()
                    ? "x" + std::to_string(j)
                    : dataset.feature_names()[static_cast<std::size_t>(j)])
            << ',';
    }
    out << y_column << '\n';
    for (Eigen::Index i = 0; i < dataset.n(); ++i) {
        for (Eigen::Index j = 0; j < dataset.d(); ++j)
            out << detail::format_double17(dataset.x(i, j)) << ',';
        out << detail::format_double17(dataset.y()[i]) << '\n';
    }
    if (!out) throw std::runtime_error("save_csv: write failure on " + path);
}

/// Column scaling policy. Auto picks SparseMaxAbs when the zero fraction of
/// the design exceeds `sparsity_threshold`, Standardize otherwise.
struct PreprocessSpec {
    enum class Mode { Standardize, SparseMaxAbs, Auto };
    Mode mode = Mode::Auto;
    double sparsity_threshold = 0.85;
    bool add_intercept = false;

    void validate() const {
        if (!(sparsity_threshold >= 0.0 && sparsity_threshold <= 1.0))
            throw std::invalid_argument(
                "PreprocessSpec: sparsity_threshold must lie in [0, 1]");
    }
};

struct PreprocessResult {
    Dataset dataset;
    PreprocessSpec::Mode mode_used; ///< never Auto
    std::vector<std::string> warnings;
};

/// Rescale feature columns (standardize to mean 0 / sd 1, or divide nonzeros
/// by the column max absolute value), leaving any `intercept` column alone,
/// and optionally prepend an all-ones intercept column first.
inline PreprocessResult preprocess(const Dataset& input, const PreprocessSpec& spec) {
    spec.validate();

    const Eigen::Index n = input.n();
    Eigen::MatrixXd x = input.X();
    std::vector<std::string> names = input.feature_names();
    if (names.empty())
        for (Eigen::Index j = 0; j < input.d(); ++j)
            names.push_back("x" + std::to_string(j));

    if (spec.add_intercept) {
        if (std::find(names.begin(), names.end(), kInterceptName) != names.end())
            throw std::invalid_argument(
                "preprocess: dataset already carries an intercept column");
        Eigen::MatrixXd with_ones(n, x.cols() + 1);
        with_ones.col(0) = Eigen::VectorXd::Ones(n);
        with_ones.rightCols(x.cols()) = x;
        x = std::move(with_ones);
        names.insert(names.begin(), kInterceptName);
    }

    std::vector<std::string> warnings;
    PreprocessSpec::Mode mode = spec.mode;
    if (mode == PreprocessSpec::Mode::Auto) {
        std::size_t zeros = 0, total = 0;
        for (Eigen::Index j = 0; j < x.cols(); ++j) {
            if (names[static_cast<std::size_t>(j)] == kInterceptName) continue;
            total += static_cast<std::size_t>(n);
            for (Eigen::Index i = 0; i < n; ++i)
                if (x(i, j) == 0.0) ++zeros;
        }
        const double sparsity =
            total == 0 ? 0.0 : static_cast<double>(zeros) / static_cast<double>(total);
        mode = sparsity > spec.sparsity_threshold ? PreprocessSpec::Mode::SparseMaxAbs
                                                  : PreprocessSpec::Mode::Standardize;
    }

    for (Eigen::Index j = 0; j < x.cols(); ++j) {
        const std::string& name = names[static_cast<std::size_t>(j)];
        if (name == kInterceptName) continue;
        if (mode == PreprocessSpec::Mode::Standardize) {
            const double mean = x.col(j).mean();
            const double sd =
                std::sqrt((x.col(j).array() - mean).square().sum() / static_cast<double>(n));
            if (sd == 0.0)
                throw std::invalid_argument(
                    "preprocess: zero-variance column '" + name + "' cannot be standardized");
            x.col(j) = (x.col(j).array() - mean) / sd;
        } else {
            const double max_abs = x.col(j).cwiseAbs().maxCoeff();
            if (max_abs == 0.0) {
                warnings.push_back("all-zero column '" + name + "' left unchanged");
                continue;
            }
            x.col(j) /= max_abs;
        }
    }
    return PreprocessResult{Dataset(std::move(x), input.y(), std::move(names)), mode,
                            std::move(warnings)};
}

/// Deterministic feature subsampling: shuffle the columns with the seeded
/// permutation and keep the first d_sub. The same seed gives the same
/// permutation for every d_sub, so smaller prefixes are nested inside
/// larger ones.
inline Dataset subsample_features(const Dataset& input, Eigen::Index d_sub,
                                  std::uint64_t shuffle_seed) {
    if (d_sub < 1 || d_sub > input.d())
        throw std::invalid_argument("subsample_features: d_sub must lie in [1, d]");
    std::vector<Eigen::Index> perm(static_cast<std::size_t>(input.d()));
    for (std::size_t i = 0; i < perm.size(); ++i)
        perm[i] = static_cast<Eigen::Index>(i);
    RngStream rng(shuffle_seed);
    for (std::size_t i = perm.size(); i > 1; --i)
        std::swap(perm[i - 1], perm[static_cast<std::size_t>(rng.uniform_index(i))]);

    Eigen::MatrixXd x(input.n(), d_sub);
    std::vector<std::string> names;
    const bool named = !input.feature_names().empty();
    for (Eigen::Index j = 0; j < d_sub; ++j) {
        x.col(j) = input.X().col(perm[static_cast<std::size_t>(j)]);
        if (named)
            names.push_back(
                input.feature_names()[static_cast<std::size_t>(perm[static_cast<std::size_t>(j)])]);
    }
    return Dataset(std::move(x), input.y(), std::move(names));
}

/// Synthetic logistic-regression designs.
///
/// IidNormal: all d columns iid N(0,1), every coefficient drawn N(0,1), and
/// the intercept `a` enters the linear predictor without a design column
/// (true_theta has length d).
///
/// The Prefix scenarios put an all-ones intercept column at position 0 and
/// `n_significant` iid N(0,1) columns with N(0,1) coefficients after it;
/// columns beyond that block carry zero coefficients and are
///   (1) fresh iid N(0,1) draws,
///   (2) exact copies of the first significant column,
///   (3) identically zero.
/// true_theta has length d: (a, theta_significant, 0, ..., 0).
struct SyntheticSpec {
    enum class Scenario {
        IidNormal,
        PrefixSignificant1,
        PrefixSignificant2,
        PrefixSignificant3
    };
    Eigen::Index n = 0;
    Eigen::Index d = 0;
    Scenario scenario = Scenario::IidNormal;
    Eigen::Index n_significant = 30;
    double intercept = 0.0;
    std::uint64_t seed = 0;

    void validate() const {
        if (n < 1 || d < 1)
            throw std::invalid_argument("SyntheticSpec: n and d must be >= 1");
        if (scenario != Scenario::IidNormal && (n_significant < 0 || n_significant > d))
            throw std::invalid_argument("SyntheticSpec: need 0 <= n_significant <= d");
        if (scenario == Scenario::PrefixSignificant2 && n_significant < 1)
            throw std::invalid_argument(
                "SyntheticSpec: scenario 2 copies the first significant column; "
                "n_significant must be >= 1");
    }
};

struct SyntheticData {
    Dataset dataset;
    Eigen::VectorXd true_theta;
};

inline SyntheticData generate_synthetic(const SyntheticSpec& spec) {
    spec.validate();
    RngStream rng(spec.seed);
    const Eigen::Index n = spec.n;
    const Eigen::Index d = spec.d;

    Eigen::MatrixXd x(n, d);
    Eigen::VectorXd theta(d);
    std::vector<std::string> names;
    Eigen::VectorXd eta = Eigen::VectorXd::Constant(n, spec.intercept);

    if (spec.scenario == SyntheticSpec::Scenario::IidNormal) {
        for (Eigen::Index j = 0; j < d; ++j) theta[j] = rng.normal();
        for (Eigen::Index j = 0; j < d; ++j) {
            for (Eigen::Index i = 0; i < n; ++i) x(i, j) = rng.normal();
            names.push_back("x" + std::to_string(j));
        }
        eta += x * theta;
    } else {
        const Eigen::Index n_sig = std::min(spec.n_significant, d - 1);
        theta[0] = spec.intercept;
        for (Eigen::Index j = 1; j <= n_sig; ++j) theta[j] = rng.normal();
        theta.tail(d - 1 - n_sig).setZero();

        x.col(0).setOnes();
        names.push_back(kInterceptName);
        for (Eigen::Index j = 1; j <= n_sig; ++j) {
            for (Eigen::Index i = 0; i < n; ++i) x(i, j) = rng.normal();
            names.push_back("x" + std::to_string(j));
        }
        for (Eigen::Index j = n_sig + 1; j < d; ++j) {
            switch (spec.scenario) {
            case SyntheticSpec::Scenario::PrefixSignificant1:
                for (Eigen::Index i = 0; i < n; ++i) x(i, j) = rng.normal();
                break;
            case SyntheticSpec::Scenario::PrefixSignificant2:
                x.col(j) = x.col(1);
                break;
            default:
                x.col(j).setZero();
                break;
            }
            names.push_back("x" + std::to_string(j));
        }
        eta = x * theta; // the intercept rides on column 0
    }

    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i)
        y[i] = rng.uniform() < logistic(eta[i]) ? 1.0 : 0.0;
    return SyntheticData{Dataset(std::move(x), std::move(y), std::move(names)),
                         std::move(theta)};
}

} // namespace cggibbs

#endif
