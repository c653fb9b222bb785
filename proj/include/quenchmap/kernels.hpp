#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "quenchmap/encoding.hpp"

namespace quenchmap::kernels {

using cplx = std::complex<double>;

/// Elementwise cos/sin of an angle array. Lives in its own translation unit
/// compiled so the libm calls vectorize; accurate to a few ulp. Callers pass
/// fixed-size aligned blocks, which keeps the generated code's lane
/// assignment independent of heap layout (bitwise-reproducible runs).
void sincos_batch(const double* angles, double* cos_out, double* sin_out, std::size_t count);

// ---------------------------------------------------------------------------
// Serial reference kernels: the plainest possible implementations, kept as
// the ground truth the fast path is tested against.
// ---------------------------------------------------------------------------
namespace serial {

/// amps *= exp(+i*theta*sigma_x) on every qubit.
void apply_mixer_layer(std::span<cplx> amps, int n_qubits, double theta);

/// amps[b] *= exp(-i*angle*energies[b]).
void apply_diagonal_phase(std::span<cplx> amps, std::span<const double> energies, double angle);

void diagonal_energies(int n_qubits, std::span<const double> fields,
                       std::span<const CouplingGraph::Edge> edges, std::span<double> out);

double norm_sq(std::span<const cplx> amps);
double expect_z(std::span<const cplx> amps, int qubit);
double expect_zz(std::span<const cplx> amps, int qubit_i, int qubit_j);

} // namespace serial

// ---------------------------------------------------------------------------
// Fast kernels: OpenMP-parallel over amplitudes, vectorized sincos for the
// diagonal phase. Reductions accumulate fixed-size block partials summed in
// block order, so results do not depend on the thread count.
// ---------------------------------------------------------------------------
namespace openmp {

void apply_mixer_layer(std::span<cplx> amps, int n_qubits, double theta);
void apply_diagonal_phase(std::span<cplx> amps, std::span<const double> energies, double angle);
void diagonal_energies(int n_qubits, std::span<const double> fields,
                       std::span<const CouplingGraph::Edge> edges, std::span<double> out);
double norm_sq(std::span<const cplx> amps);
double expect_z(std::span<const cplx> amps, int qubit);
double expect_zz(std::span<const cplx> amps, int qubit_i, int qubit_j);

} // namespace openmp

enum class Backend { automatic, serial, openmp };

/// Thread the fast path only when the state is big enough to pay for it.
bool use_openmp(Backend backend, std::size_t dim);

} // namespace quenchmap::kernels
