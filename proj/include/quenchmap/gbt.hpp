#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "quenchmap/matrix.hpp"

namespace quenchmap {

/// One regression tree stored as a flat node array. Leaves have feature -1
/// and carry the fitted value; internal nodes send x[feature] <= threshold
/// left, else right.
struct GbtTree {
    struct Node {
        int feature = -1;
        double threshold = 0.0;
        double value = 0.0;
        int left = -1, right = -1;
    };
    std::vector<Node> nodes;

    double predict(std::span<const double> x) const;
};

struct GbtOptions {
    int n_trees = 100;
    int max_depth = 3;
    double learning_rate = 0.1;
    int min_samples_split = 2;
    double subsample = 1.0;          ///< row fraction per tree; 1.0 disables bagging
    std::uint64_t seed = 0;
    double leaf_clamp = 10.0;        ///< cap on |leaf value| to keep log-odds finite
};

/// Gradient-boosted trees for binary classification with logistic loss.
/// Trees fit the residual y - p; leaf values are Newton steps.
struct GbtModel {
    double base_score = 0.0;         ///< prior log-odds
    double learning_rate = 0.1;
    std::vector<GbtTree> trees;
};

GbtModel gbt_train(const Matrix& x, std::span<const int> labels, const GbtOptions& options);

/// P(y = +1) per row.
std::vector<double> gbt_predict_proba(const GbtModel& model, const Matrix& x);
std::vector<int> gbt_predict(const GbtModel& model, const Matrix& x);

void save_gbt(const GbtModel& model, const std::string& path);
GbtModel load_gbt(const std::string& path);

} // namespace quenchmap
