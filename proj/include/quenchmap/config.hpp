#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "quenchmap/encoding.hpp"
#include "quenchmap/schedule.hpp"

namespace quenchmap {

enum class ModelKind { svm, svm_fidelity, gbt };
enum class Representation { raw, aqfm };

std::string model_name(ModelKind kind);
std::string representation_name(Representation repr);

/// Hyperparameter grids searched on the inner split.
struct ModelGrids {
    std::vector<double> svm_c = {0.1, 1.0, 10.0, 100.0};
    std::vector<int> gbt_trees = {100, 300};
    std::vector<int> gbt_depth = {2, 3};
    std::vector<double> gbt_rate = {0.05, 0.1};
};

/// Every knob of an experiment run. Defaults reproduce the benchmark
/// protocol: 10x5 stratified CV, anneal sweep over short coherent quenches
/// plus a long anchor, mutual-information feature screening.
struct ExperimentConfig {
    std::string dataset_path;
    std::string label_column = "label";

    // preprocessing
    std::optional<std::size_t> top_k;
    double mi_threshold = 0.005;
    int mi_bins = 10;

    // encoding
    EncodingOptions encoding;

    // quench
    AnnealSchedule schedule;            ///< tau_ns field ignored; tau_list drives the sweep
    std::vector<double> tau_list = {5.0, 10.0, 20.0, 30.0, 40.0, 100.0};
    double dt_ns = 0.01;
    std::optional<int> shots;           ///< unset = exact expectation values
    bool include_zz = true;
    std::uint64_t seed = 1;             ///< base seed for shot noise

    // models
    std::vector<ModelKind> models = {ModelKind::svm, ModelKind::gbt};
    ModelGrids grids;
    bool nested_grid_search = false;    ///< true: 5-fold inner CV instead of one 80/20 split

    // cross-validation
    int n_splits = 10;
    int n_repeats = 5;
    std::uint64_t cv_seed = 7;

    int jobs = 1;
};

/// Plain "key = value" config file; '#' starts a comment, lists are
/// comma-separated, unknown keys are an error.
ExperimentConfig load_config(const std::string& path);

/// Parse one override in the same key=value syntax onto an existing config.
void apply_config_line(ExperimentConfig& config, const std::string& line);

/// Echo the effective configuration in reloadable form.
void write_config(const ExperimentConfig& config, std::ostream& out);

/// Stable fingerprint of everything that affects results; guards the resume
/// ledger against config drift.
std::uint64_t config_fingerprint(const ExperimentConfig& config);

} // namespace quenchmap
