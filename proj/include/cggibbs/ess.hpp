#ifndef CGGIBBS_ESS_HPP
#define CGGIBBS_ESS_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace cggibbs {

/// Biased (divide-by-T) sample autocovariance at the given lag.
inline double autocovariance(const Eigen::VectorXd& x, Eigen::Index lag) {
    const Eigen::Index t = x.size();
    if (t < 2) throw std::invalid_argument("autocovariance: need at least 2 samples");
    if (lag < 0 || lag >= t)
        throw std::invalid_argument("autocovariance: lag out of range");
    const double mean = x.mean();
    double acc = 0.0;
    for (Eigen::Index i = 0; i + lag < t; ++i)
        acc += (x[i] - mean) * (x[i + lag] - mean);
    return acc / static_cast<double>(t);
}

/// Asymptotic variance of the mean of a reversible chain, estimated by the
/// initial-positive-sequence rule: sum paired autocovariances
/// gamma_{2m} + gamma_{2m+1} until the first non-positive pair. Intended for
/// series of at least ~100 points; shorter input inflates estimator noise.
inline double asymptotic_variance(const Eigen::VectorXd& x) {
    const Eigen::Index t = x.size();
    if (t < 4) throw std::invalid_argument("asymptotic_variance: need at least 4 samples");
    const double gamma0 = autocovariance(x, 0);
    // (x.array() == x[0]).all() catches exactly-constant input whose gamma0
    // rounds to a tiny positive value through the mean computation.
    if (gamma0 <= 0.0 || (x.array() == x[0]).all())
        throw std::invalid_argument("asymptotic_variance: constant series has zero variance");
    double acc = -gamma0;
    for (Eigen::Index m = 0; 2 * m + 1 < t; ++m) {
        const double pair = autocovariance(x, 2 * m) + autocovariance(x, 2 * m + 1);
        if (pair <= 0.0) break;
        acc += 2.0 * pair;
    }
    // Immediate truncation on a strongly antithetic chain leaves -gamma0;
    // floor at a tiny positive value so the ratio below stays finite.
    return std::max(acc, 1e-12 * gamma0);
}

/// Effective sample size T * gamma_0 / asymptotic variance. Unclipped: a
/// super-efficient (antithetic) chain may legitimately exceed T.
inline double ess(const Eigen::VectorXd& x) {
    const Eigen::Index t = x.size();
    if (t < 4) throw std::invalid_argument("ess: need at least 4 samples");
    const double gamma0 = autocovariance(x, 0);
    if (gamma0 <= 0.0 || (x.array() == x[0]).all())
        throw std::invalid_argument("ess: constant series has zero variance");
    return static_cast<double>(t) * gamma0 / asymptotic_variance(x);
}

/// Per-column ESS summary over a draws matrix, for the identity and square
/// test functions. Reported values are clipped at 1.5 * T_kept (estimator
/// noise headroom); scalar cost figures are defined against the median ESS.
/// Degenerate (constant) columns are excluded from min/median with a
/// warning; a run is unreliable when the min ESS falls below 100 or fewer
/// than 100 samples were kept.
struct EssReport {
    std::vector<std::string> columns;
    Eigen::VectorXd ess_identity;  ///< ESS of each column, clipped; NaN if degenerate
    Eigen::VectorXd ess_square;    ///< ESS of each squared column, clipped; NaN if degenerate
    double min_ess = 0.0;          ///< min over both test functions
    double median_ess = 0.0;       ///< median over both test functions
    double sweeps_per_ess = 0.0;   ///< T_kept / median_ess
    double seconds_per_ess = 0.0;  ///< wall_seconds / median_ess
    Eigen::Index t_kept = 0;
    bool unreliable = false;
    std::vector<std::string> warnings;
};

inline EssReport ess_report(const Eigen::MatrixXd& draws,
                            const std::vector<std::string>& columns = {},
                            double wall_seconds = 0.0) {
    const Eigen::Index t = draws.rows();
    const Eigen::Index d = draws.cols();
    if (t < 4) throw std::invalid_argument("ess_report: need at least 4 samples");
    if (d < 1) throw std::invalid_argument("ess_report: need at least one column");
    if (!columns.empty() && static_cast<Eigen::Index>(columns.size()) != d)
        throw std::invalid_argument("ess_report: column-name count mismatch");

    EssReport report;
    report.columns = columns;
    report.t_kept = t;
    report.ess_identity.resize(d);
    report.ess_square.resize(d);
    const double cap = 1.5 * static_cast<double>(t);
    const double nan = std::numeric_limits<double>::quiet_NaN();
    std::vector<double> usable;
    usable.reserve(static_cast<std::size_t>(2 * d));

    const auto column_label = [&](Eigen::Index j) {
        return columns.empty() ? "column " + std::to_string(j) : columns[static_cast<std::size_t>(j)];
    };
    const auto clipped_ess = [&](const Eigen::VectorXd& series, Eigen::Index j,
                                 const char* fn) {
        try {
            const double value = std::min(ess(series), cap);
            usable.push_back(value);
            return value;
        } catch (const std::invalid_argument&) {
            report.warnings.push_back("degenerate " + std::string(fn) +
                                      " series for " + column_label(j) +
                                      "; excluded from min/median");
            return nan;
        }
    };
    for (Eigen::Index j = 0; j < d; ++j) {
        const Eigen::VectorXd col = draws.col(j);
        report.ess_identity[j] = clipped_ess(col, j, "identity");
        report.ess_square[j] = clipped_ess(col.cwiseProduct(col).eval(), j, "square");
    }
    if (usable.empty())
        throw std::invalid_argument("ess_report: every test-function series is constant");

    std::sort(usable.begin(), usable.end());
    report.min_ess = usable.front();
    const std::size_t m = usable.size();
    report.median_ess =
        (m % 2 == 1) ? usable[m / 2] : 0.5 * (usable[m / 2 - 1] + usable[m / 2]);
    report.sweeps_per_ess = static_cast<double>(t) / report.median_ess;
    report.seconds_per_ess = wall_seconds / report.median_ess;
    report.unreliable = report.min_ess < 100.0 || t < 100;
    return report;
}

} // namespace cggibbs

#endif
