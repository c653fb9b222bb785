#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "quenchmap/config.hpp"
#include "quenchmap/dataset.hpp"
#include "quenchmap/encoding.hpp"
#include "quenchmap/metrics.hpp"

namespace quenchmap {

/// Everything fit on a training fold before mapping. Depends only on the
/// training rows, never on test values — the leakage audit checks this
/// bitwise.
struct FoldArtifacts {
    std::vector<double> medians;
    Standardization scaler;
    SelectionResult selection;
    CouplingGraph graph;
};

FoldArtifacts fit_fold_artifacts(const TabularDataset& data,
                                 std::span<const std::size_t> train_rows,
                                 const ExperimentConfig& config);

/// One scored cell of the experiment grid.
struct FoldScore {
    int repeat = 0;
    int fold = 0;
    double tau_ns = 0.0;
    ModelKind model = ModelKind::svm;
    Representation repr = Representation::raw;
    MetricsReport metrics;
    std::string hyperparams;        ///< winning grid point, e.g. "C=10"
    bool skipped = false;
    std::string skip_reason;
};

/// Run one outer fold at one anneal time: fit artifacts on the training
/// rows, map both splits, pick hyperparameters on an inner stratified split
/// of the training fold, then score every configured model on both the raw
/// and the mapped representation. A non-empty cache_dir persists per-sample
/// quench features there.
std::vector<FoldScore> run_fold(const TabularDataset& data, const SplitPlan& plan,
                                std::size_t fold_index, double tau_ns,
                                const ExperimentConfig& config,
                                const std::string& cache_dir = "");

struct SummaryRow {
    ModelKind model = ModelKind::svm;
    Representation repr = Representation::raw;
    double tau_ns = 0.0;
    std::string metric;
    std::size_t n = 0;
    double median = 0.0;
    double q1 = 0.0, q3 = 0.0;      ///< linearly interpolated quartiles
    double iqr = 0.0;
};

struct SweepResult {
    std::vector<FoldScore> rows;    ///< canonical order: tau, model, repr, repeat, fold
    std::vector<SummaryRow> summary;
};

/// Full experiment: folds x tau_list cells through a bounded work queue,
/// results persisted as folds.csv + summary.csv + the effective config.
/// Completed cells are journaled to cells.log as they finish; rerunning over
/// the same output directory skips them, and an interrupted run resumes.
SweepResult run_experiment(const TabularDataset& data, const ExperimentConfig& config,
                           const std::string& out_dir);

std::vector<SummaryRow> summarize(std::span<const FoldScore> rows);

void write_folds_csv(std::span<const FoldScore> rows, const std::string& dataset_name,
                     const std::string& path);
void write_summary_csv(std::span<const SummaryRow> summary, const std::string& path);

/// Median and linearly interpolated quartiles of an unsorted sample.
struct Quartiles {
    double q1 = 0.0, median = 0.0, q3 = 0.0;
};
Quartiles quartiles(std::span<const double> values);

} // namespace quenchmap
