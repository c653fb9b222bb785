#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "quenchmap/dataset.hpp"
#include "quenchmap/encoding.hpp"
#include "quenchmap/matrix.hpp"
#include "quenchmap/quench.hpp"

namespace quenchmap {

/// One sample's quantum features: per-qubit <sigma^z>, optionally followed by
/// <sigma^z sigma^z> on the coupled pairs (in the graph's edge order).
struct QuantumFeatureVector {
    std::vector<double> z;
    std::vector<double> zz;

    std::vector<double> flat() const;
};

struct FeatureMapOptions {
    QuenchConfig quench;
    bool include_zz = true;
    double h_max = 4.0;             ///< field clamp applied when encoding each sample
    std::optional<int> shots;       ///< estimate observables from sampled bitstrings
    std::uint64_t seed = 0;         ///< base seed; each row uses seed combined with its index
    std::string cache_dir;          ///< non-empty: persist per-sample features on disk
};

/// Everything needed to reproduce a mapped dataset.
struct FeatureMapProvenance {
    int n_qubits = 0;
    std::size_t n_edges = 0;
    std::string schedule;           ///< schedule_descriptor() of the quench schedule
    double tau_ns = 0.0;
    double dt_ns = 0.0;
    bool include_zz = true;
    int shots = 0;                  ///< 0 means exact expectation values
    std::uint64_t seed = 0;
};

struct MappedDataset {
    Matrix features;                ///< one row per sample: z block then zz block
    std::vector<int> labels;
    std::vector<std::string> column_names;
    FeatureMapProvenance provenance;
};

QuantumFeatureVector map_sample(std::span<const double> x, const CouplingGraph& graph,
                                const FeatureMapOptions& options, std::uint64_t row_seed);

/// Map every row of a standardized feature matrix. When keep_states is given
/// the final state of each quench is stored there (that path bypasses the
/// disk cache, since cached entries hold features only).
MappedDataset map_dataset(const Matrix& x, std::span<const int> labels,
                          const CouplingGraph& graph, const FeatureMapOptions& options,
                          std::vector<StateVector>* keep_states = nullptr);

void save_mapped_csv(const MappedDataset& mapped, const std::string& path);
MappedDataset load_mapped_csv(const std::string& path);

} // namespace quenchmap
