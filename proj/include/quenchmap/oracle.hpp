#pragma once

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "quenchmap/encoding.hpp"
#include "quenchmap/schedule.hpp"

// Independent cross-checks for the simulator. Everything here is built the
// slow, obvious way — dense matrices, textbook algorithms — and shares no
// code path with the production kernels, so agreement is meaningful.
namespace quenchmap::oracle {

using cplx = std::complex<double>;

/// Dense column-major Hermitian matrix of the interpolating Hamiltonian
/// A(s)*(-sum sigma^x) + B(s)*H_z, assembled by explicit Kronecker products.
std::vector<cplx> assemble_hamiltonian(const IsingInstance& instance,
                                       const AnnealSchedule& schedule, double s);

/// Integrate i d|psi>/dt = H(t/tau) |psi| with classic fixed-step RK4.
std::vector<cplx> integrate_schroedinger(const IsingInstance& instance,
                                         const AnnealSchedule& schedule, double tau_ns,
                                         std::vector<cplx> psi0, double dt_ns);

/// Expectations by exhaustive basis-state summation.
double expect_z_brute(std::span<const cplx> amps, int n_qubits, int qubit);
double expect_zz_brute(std::span<const cplx> amps, int n_qubits, int qubit_i, int qubit_j);

/// Lowest eigenpair of a dense Hermitian matrix by cyclic Jacobi rotations.
struct EigenPair {
    double value = 0.0;
    std::vector<cplx> vector;
};
EigenPair jacobi_lowest_eigenpair(std::vector<cplx> matrix, std::size_t dim);

/// Run every cross-check on a seeded random n-qubit instance and print one
/// line per check. Returns true when all pass.
bool run_oracle_suite(int n_qubits, std::uint64_t seed, std::ostream& out);

} // namespace quenchmap::oracle
