#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "quenchmap/matrix.hpp"

namespace quenchmap {

/// Numeric feature table with a missing-value mask and binary labels.
struct TabularDataset {
    Matrix values;                         // N x d
    std::vector<std::uint8_t> missing;     // N x d, row-major, 1 = missing
    std::vector<int> labels;               // length N, values 0/1
    std::vector<std::string> column_names; // length d

    std::size_t n_rows() const { return values.rows; }
    std::size_t n_cols() const { return values.cols; }
    bool missing_at(std::size_t i, std::size_t j) const { return missing[i * values.cols + j] != 0; }
    bool has_missing() const;

    /// Shape/label sanity; throws on violation.
    void validate() const;

    /// Row subset, preserving the given order.
    TabularDataset select_rows(std::span<const std::size_t> idx) const;
    /// Column subset, preserving the given order.
    TabularDataset select_cols(std::span<const std::size_t> idx) const;
};

/// Everything fitted on a training set that later transforms held-out data.
struct PreprocessReport {
    std::vector<double> medians;
    std::vector<double> means;
    std::vector<double> std_devs; // 0 marks a constant column
    std::vector<std::size_t> selected_columns;
    std::vector<double> mi_scores; // one per original column
};

struct SplitPlan {
    int n_splits = 0;
    int n_repeats = 0;
    std::uint64_t seed = 0;
    struct Fold {
        std::vector<std::size_t> train;
        std::vector<std::size_t> test;
    };
    std::vector<Fold> folds; // n_splits * n_repeats entries, repeat-major
};

/// Load a CSV with a header row. Cells that are empty, "NA" or "nan"
/// (case-insensitive) or otherwise non-numeric become missing with a zero
/// placeholder. The label column must hold exactly two distinct raw values;
/// the lexicographically larger one maps to 1.
TabularDataset load_csv_dataset(const std::string& path, const std::string& label_column);

/// Replace masked cells by the per-column median of the unmasked entries
/// (even count = mean of the two central values). Clears the mask.
std::pair<TabularDataset, std::vector<double>> impute_median(const TabularDataset& data);

/// Apply previously fitted medians to the masked cells (held-out path).
TabularDataset impute_with(const TabularDataset& data, const std::vector<double>& medians);

struct Standardization {
    std::vector<double> means;
    std::vector<double> std_devs; // population std; 0 marks a constant column
};

/// Fit per-column mean and population std, then transform. Columns with
/// std below 1e-12 are flagged constant (std_dev 0) and map to all-zeros.
std::pair<TabularDataset, Standardization> standardize_fit(const TabularDataset& data);

/// Transform with previously fitted statistics (held-out path).
TabularDataset standardize_apply(const TabularDataset& data, const Standardization& stats);

/// Mutual information in nats between an equal-frequency binning of the
/// feature and the binary labels. Binning is rank-based with tied values
/// sharing a bin, so the estimate is invariant under strictly monotone
/// transforms of the feature. Clamped to >= 0.
double mutual_information(std::span<const double> feature, std::span<const int> labels,
                          int n_bins = 10);

struct SelectionResult {
    std::vector<std::size_t> selected_columns; // by descending MI, ties by index
    std::vector<double> mi_scores;             // one per input column
};

/// Drop zero-variance columns and columns with MI below the threshold, rank
/// the rest by MI, optionally keep the top k. Output columns follow the
/// selection order.
std::pair<TabularDataset, SelectionResult> select_features(const TabularDataset& data,
                                                           std::optional<std::size_t> top_k,
                                                           double mi_threshold,
                                                           int n_bins = 10);

/// Repeated stratified k-fold plan. Per repeat r the row indices of each
/// class are shuffled with seed + r and dealt round-robin into folds, so a
/// seed reproduces the plan exactly.
SplitPlan stratified_splits(const std::vector<int>& labels, int n_splits, int n_repeats,
                            std::uint64_t seed);

void save_report(const std::string& path, const PreprocessReport& report);
PreprocessReport load_report(const std::string& path);

} // namespace quenchmap
