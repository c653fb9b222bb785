#pragma once

#include <span>

namespace quenchmap {

/// Binary classification metrics. Positive class is +1. "accuracy" is
/// balanced accuracy (mean of per-class recalls); plain accuracy is kept
/// alongside it. Undefined ratios (empty denominators) are reported as 0,
/// except auc which is NaN when only one class is present.
struct MetricsReport {
    double accuracy = 0.0;           ///< balanced accuracy
    double accuracy_plain = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    double auc = 0.0;
};

/// scores are real-valued (decision values or probabilities), higher meaning
/// more positive; ties get half credit in the AUC via average ranks.
MetricsReport compute_metrics(std::span<const int> y_true, std::span<const int> y_pred,
                              std::span<const double> scores);

} // namespace quenchmap
