#include "quenchmap/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace quenchmap {

MetricsReport compute_metrics(std::span<const int> y_true, std::span<const int> y_pred,
                              std::span<const double> scores) {
    const std::size_t n = y_true.size();
    if (y_pred.size() != n || scores.size() != n)
        throw std::runtime_error("metrics: length mismatch");
    if (n == 0) throw std::runtime_error("metrics: empty input");

    std::size_t tp = 0, tn = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const bool pos = y_true[i] > 0, hit = y_pred[i] > 0;
        if (pos && hit) ++tp;
        else if (pos) ++fn;
        else if (hit) ++fp;
        else ++tn;
    }

    auto ratio = [](std::size_t num, std::size_t den) {
        return den ? static_cast<double>(num) / static_cast<double>(den) : 0.0;
    };

    MetricsReport r;
    r.accuracy_plain = static_cast<double>(tp + tn) / static_cast<double>(n);
    r.precision = ratio(tp, tp + fp);
    r.recall = ratio(tp, tp + fn);
    const double recall_neg = ratio(tn, tn + fp);
    const std::size_t n_pos = tp + fn, n_neg = tn + fp;
    if (n_pos && n_neg) r.accuracy = 0.5 * (r.recall + recall_neg);
    else r.accuracy = n_pos ? r.recall : recall_neg;
    r.f1 = r.precision + r.recall > 0.0
               ? 2.0 * r.precision * r.recall / (r.precision + r.recall)
               : 0.0;

    // Mann-Whitney AUC via average ranks; ties get half credit
    if (n_pos == 0 || n_neg == 0) {
        r.auc = std::numeric_limits<double>::quiet_NaN();
        return r;
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
    std::vector<double> rank(n);
    std::size_t run_start = 0;
    while (run_start < n) {
        std::size_t run_end = run_start + 1;
        while (run_end < n && scores[order[run_end]] == scores[order[run_start]]) ++run_end;
        const double avg = 0.5 * static_cast<double>(run_start + run_end - 1) + 1.0;
        for (std::size_t k = run_start; k < run_end; ++k) rank[order[k]] = avg;
        run_start = run_end;
    }
    double rank_sum = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        if (y_true[i] > 0) rank_sum += rank[i];
    const double np = static_cast<double>(n_pos), nn = static_cast<double>(n_neg);
    r.auc = (rank_sum - np * (np + 1.0) / 2.0) / (np * nn);
    return r;
}

} // namespace quenchmap
