#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "quenchmap/encoding.hpp"
#include "quenchmap/kernels.hpp"
#include "quenchmap/rng.hpp"
#include "quenchmap/schedule.hpp"

namespace quenchmap {

using cplx = std::complex<double>;

/// Full state vector over n qubits. Basis index bit i set <=> qubit i points
/// down (sigma^z eigenvalue -1), so z_i(b) = 1 - 2*bit_i(b).
struct StateVector {
    int n_qubits = 0;
    std::vector<cplx> amps;

    std::size_t dim() const { return amps.size(); }
};

/// Uniform superposition |+>^n, the ground state of the pure driver.
StateVector plus_state(int n_qubits);

struct QuenchConfig {
    AnnealSchedule schedule;           ///< envelopes; schedule.tau_ns is the quench duration
    double dt_ns = 0.01;               ///< Trotter step size
    kernels::Backend backend = kernels::Backend::automatic;
    int max_qubits = kDefaultMaxSimQubits;
};

struct EvolveStats {
    std::size_t n_steps = 0;
    double final_norm = 0.0;
    double max_norm_drift = 0.0;    ///< max over steps of |norm^2 - 1|
};

/// Evolve |+>^n under the interpolating Hamiltonian for tau_ns using
/// second-order symmetric Trotter steps with envelopes sampled at each
/// step's midpoint. Tau of zero returns the initial state unchanged.
StateVector evolve(const IsingInstance& instance, const QuenchConfig& config,
                   EvolveStats* stats = nullptr);

double expect_z(const StateVector& state, int qubit);
double expect_zz(const StateVector& state, int qubit_i, int qubit_j);

/// Draw basis states from |psi|^2 by inverse CDF over a single cumulative
/// pass; deterministic for a given seed.
std::vector<std::uint64_t> sample_bitstrings(const StateVector& state, int n_shots,
                                             std::uint64_t seed);

/// Estimate <sigma^z_i> from counted bitstrings.
std::vector<double> estimate_z_from_samples(std::span<const std::uint64_t> samples, int n_qubits);

struct GroundState {
    double energy = 0.0;
    StateVector state;
};

/// Lowest eigenpair of the full interpolating Hamiltonian at fixed s.
/// Dense solve, so n is capped (default 12). When the driver envelope
/// vanishes the Hamiltonian is diagonal and the argmin basis state is
/// returned directly.
GroundState exact_ground_state(const IsingInstance& instance, const AnnealSchedule& schedule,
                               double s, int max_qubits = 12);

/// Binary state dump ("QSV1": magic, qubit count, raw amplitudes).
void save_state(const StateVector& state, const std::string& path);
StateVector load_state(const std::string& path);

} // namespace quenchmap
