#ifndef CGGIBBS_DATASET_HPP
#define CGGIBBS_DATASET_HPP

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace cggibbs {

/// Design matrix plus binary responses.
///
/// X is stored dense column-major (coordinate updates walk one column at a
/// time, so columns are the hot access path). When more than half of the
/// entries are zero a compressed-sparse-column view is built as well and
/// cache updates touch only the stored nonzeros.
///
/// If an intercept is used it is column 0 (prepended by data_io) and counts
/// toward d.
class Dataset {
public:
    Dataset() = default;

    Dataset(Eigen::MatrixXd X, Eigen::VectorXd y,
            std::vector<std::string> feature_names = {})
        : X_(std::move(X)), y_(std::move(y)),
          feature_names_(std::move(feature_names)) {
        validate();
        maybe_build_csc();
    }

    Eigen::Index n() const { return X_.rows(); }
    Eigen::Index d() const { return X_.cols(); }

    const Eigen::MatrixXd& X() const { return X_; }
    const Eigen::VectorXd& y() const { return y_; }
    const std::vector<std::string>& feature_names() const { return feature_names_; }

    double x(Eigen::Index i, Eigen::Index j) const { return X_(i, j); }

    bool is_sparse() const { return sparse_; }
    double zero_fraction() const { return zero_fraction_; }

    /// Number of stored nonzeros in column j (n when dense).
    Eigen::Index column_nnz(Eigen::Index j) const {
        check_column(j);
        if (!sparse_) return n();
        return csc_col_ptr_[j + 1] - csc_col_ptr_[j];
    }

    /// Applies f(row, value) to every stored entry of column j.
    /// Dense data visits all n rows; sparse data visits only nonzeros.
    template <typename F>
    void for_each_in_column(Eigen::Index j, F&& f) const {
        check_column(j);
        if (sparse_) {
            for (Eigen::Index k = csc_col_ptr_[j]; k < csc_col_ptr_[j + 1]; ++k)
                f(csc_row_idx_[k], csc_values_[k]);
        } else {
            const double* col = X_.col(j).data();
            for (Eigen::Index i = 0; i < n(); ++i) f(i, col[i]);
        }
    }

private:
    void validate() const {
        if (X_.rows() < 1 || X_.cols() < 1)
            throw std::invalid_argument("Dataset: need n >= 1 and d >= 1");
        if (y_.size() != X_.rows())
            throw std::invalid_argument("Dataset: y length does not match row count");
        if (!feature_names_.empty() &&
            static_cast<Eigen::Index>(feature_names_.size()) != X_.cols())
            throw std::invalid_argument("Dataset: feature_names length does not match column count");
        for (Eigen::Index i = 0; i < y_.size(); ++i)
            if (y_[i] != 0.0 && y_[i] != 1.0)
                throw std::invalid_argument("Dataset: responses must lie in {0,1}");
        if (!X_.allFinite())
            throw std::invalid_argument("Dataset: design matrix has non-finite entries");
    }

    void maybe_build_csc() {
        const Eigen::Index total = X_.size();
        Eigen::Index zeros = 0;
        for (Eigen::Index j = 0; j < X_.cols(); ++j)
            for (Eigen::Index i = 0; i < X_.rows(); ++i)
                if (X_(i, j) == 0.0) ++zeros;
        zero_fraction_ = static_cast<double>(zeros) / static_cast<double>(total);
        sparse_ = zero_fraction_ > 0.5;
        if (!sparse_) return;

        csc_col_ptr_.assign(X_.cols() + 1, 0);
        csc_row_idx_.reserve(total - zeros);
        csc_values_.reserve(total - zeros);
        for (Eigen::Index j = 0; j < X_.cols(); ++j) {
            for (Eigen::Index i = 0; i < X_.rows(); ++i) {
                const double v = X_(i, j);
                if (v != 0.0) {
                    csc_row_idx_.push_back(i);
                    csc_values_.push_back(v);
                }
            }
            csc_col_ptr_[j + 1] = static_cast<Eigen::Index>(csc_values_.size());
        }
    }

    void check_column(Eigen::Index j) const {
        if (j < 0 || j >= X_.cols())
            throw std::out_of_range("Dataset: column index out of range");
    }

    Eigen::MatrixXd X_;
    Eigen::VectorXd y_;
    std::vector<std::string> feature_names_;

    bool sparse_ = false;
    double zero_fraction_ = 0.0;
    std::vector<Eigen::Index> csc_col_ptr_;
    std::vector<Eigen::Index> csc_row_idx_;
    std::vector<double> csc_values_;
};

} // namespace cggibbs

#endif
