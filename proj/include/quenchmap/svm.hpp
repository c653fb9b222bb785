#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "quenchmap/matrix.hpp"

namespace quenchmap {

/// Binary C-SVM trained on a precomputed kernel. Labels are {-1,+1}; the
/// decision function is f(t) = sum_i alpha_i y_i K(i,t) + bias.
struct SvmModel {
    std::vector<double> alphas;      ///< one per training row (zeros kept for indexing)
    std::vector<std::int8_t> labels; ///< training labels, -1 or +1
    double bias = 0.0;
    double c = 1.0;
    std::vector<std::size_t> support_rows; ///< rows with alpha > 0
    double dual_objective = 0.0;
    double duality_gap = 0.0;
    std::size_t iterations = 0;
    bool shifted = false;            ///< kernel needed a diagonal shift to optimize cleanly
};

struct SvmOptions {
    double c = 1.0;
    double tol = 1e-4;               ///< KKT violation threshold for pair selection
    std::size_t max_iter = 1000000;
    double gap_tol = 1e-6;           ///< absolute primal-dual gap to certify at convergence
};

/// Sequential minimal optimization over a precomputed square kernel (rows and
/// columns indexed by training samples). Labels may be any two values; they
/// are mapped to -1/+1 with the larger original value mapped to +1.
SvmModel svm_train(const Matrix& kernel, std::span<const int> labels, const SvmOptions& options);

struct SvmPrediction {
    std::vector<int> labels;         ///< -1 or +1
    std::vector<double> decision;    ///< signed distance-like score per test row
};

/// kernel_test(t, i) = K(test_t, train_i); column count must match the
/// training set size the model was fit on.
SvmPrediction svm_predict(const SvmModel& model, const Matrix& kernel_test);

void save_svm(const SvmModel& model, const std::string& path);
SvmModel load_svm(const std::string& path);

} // namespace quenchmap
