#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "quenchmap/matrix.hpp"

namespace quenchmap {

inline constexpr int kDefaultMaxSimQubits = 24;

/// Pairwise zz interaction weights shared by every sample of a dataset.
struct CouplingGraph {
    struct Edge {
        int i = 0;
        int j = 0; // i < j
        double weight = 0.0;
    };
    int n = 0;
    std::vector<Edge> edges; // sorted by (i, j)

    void validate(double j_max = 1.0) const;
};

/// One sample's problem Hamiltonian: longitudinal fields plus couplings.
/// Energy of basis state b is sum_i h_i z_i + sum_(i<j) J_ij z_i z_j with
/// z_i = +1 when bit i of b is 0 and -1 when it is 1.
struct IsingInstance {
    int n = 0;
    std::vector<double> fields;
    CouplingGraph couplings;
};

struct EncodingOptions {
    double corr_threshold = 0.1;
    std::optional<int> max_degree;
    double coupling_scale = 1.0;
    double h_max = 4.0;
    double j_max = 1.0;
};

/// Pearson correlation of two equally long columns; 0 when either is constant.
double pearson(std::span<const double> a, std::span<const double> b);

/// Turn training-set feature correlations into couplings: keep pairs with
/// |rho| >= corr_threshold, weight them J = -coupling_scale * rho, and when
/// max_degree is set keep per node only its strongest edges (an edge survives
/// if either endpoint keeps it). Ties break by (i, j) order.
CouplingGraph fit_couplings(const Matrix& train_values, const EncodingOptions& opts);

/// Clamp the feature vector into the longitudinal fields and attach the
/// shared couplings.
IsingInstance encode_sample(std::span<const double> x, const CouplingGraph& couplings,
                            double h_max = 4.0);

/// Energies of all 2^n basis states, in basis order (qubit 0 = bit 0).
std::vector<double> diagonal_energies(const IsingInstance& instance,
                                      int max_qubits = kDefaultMaxSimQubits);

/// Text format: "n <count>", then "h <i> <value>" and "J <i> <j> <value>" lines.
void save_instance(const std::string& path, const IsingInstance& instance);
IsingInstance load_instance(const std::string& path);
void save_couplings(const std::string& path, const CouplingGraph& graph);
CouplingGraph load_couplings(const std::string& path);

} // namespace quenchmap
