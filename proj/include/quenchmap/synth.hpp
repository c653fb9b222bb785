#pragma once

#include <cstdint>

#include "quenchmap/dataset.hpp"
#include "quenchmap/encoding.hpp"

namespace quenchmap {

/// Synthetic benchmark set with labels planted by an Ising ground state:
/// samples are correlated Gaussians whose feature correlations mirror a
/// fixed sparse coupling graph, and each label is the sign of the summed
/// magnetization of the planted instance's zero-driver ground state.
/// Samples with near-zero magnetization are rejected so the labels are
/// stable under small encoding perturbations.
struct PlantedDataset {
    TabularDataset data;
    CouplingGraph graph;            ///< the planted couplings
};

PlantedDataset make_planted_dataset(std::size_t n_samples, int n_features, std::uint64_t seed);

} // namespace quenchmap
