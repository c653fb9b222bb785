#include "quenchmap/kernels.hpp"

#include <cmath>
#include <cstdint>
#include <vector>

namespace quenchmap::kernels {

bool use_openmp(Backend backend, std::size_t dim) {
    switch (backend) {
        case Backend::serial: return false;
        case Backend::openmp: return true;
        case Backend::automatic: break;
    }
    // The fast path pays for itself through vectorization alone, so the
    // threshold only guards tiny states where dispatch overhead dominates.
    return dim >= 64;
}

namespace openmp {

// Fixed reduction block: partials are accumulated per 4096-element block and
// summed in block order, so every reduction below is bitwise independent of
// the thread count.
constexpr std::int64_t kRedBlock = 4096;

// Work unit for the blocked phase kernel; small enough for the stack, large
// enough that the vector-math call amortizes.
constexpr std::size_t kPhaseBlock = 512;

void apply_mixer_layer(std::span<cplx> amps, int n_qubits, double theta) {
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    const std::int64_t half = static_cast<std::int64_t>(amps.size() >> 1);
    cplx* a = amps.data();
    for (int q = 0; q < n_qubits; ++q) {
        const std::size_t mask = std::size_t{1} << q;
        const std::size_t lo = mask - 1;
        const std::size_t hi = ~lo;
#pragma omp parallel for schedule(static)
        for (std::int64_t k = 0; k < half; ++k) {
            const std::size_t uk = static_cast<std::size_t>(k);
            const std::size_t i0 = ((uk & hi) << 1) | (uk & lo);
            const std::size_t i1 = i0 | mask;
            const double r0 = a[i0].real(), m0 = a[i0].imag();
            const double r1 = a[i1].real(), m1 = a[i1].imag();
            a[i0] = {c * r0 - s * m1, c * m0 + s * r1};
            a[i1] = {c * r1 - s * m0, c * m1 + s * r0};
        }
    }
}

void apply_diagonal_phase(std::span<cplx> amps, std::span<const double> energies, double angle) {
    const std::int64_t n_blocks =
        static_cast<std::int64_t>((amps.size() + kPhaseBlock - 1) / kPhaseBlock);
    cplx* a = amps.data();
    const double* e = energies.data();
#pragma omp parallel for schedule(static)
    for (std::int64_t blk = 0; blk < n_blocks; ++blk) {
        alignas(64) double ang[kPhaseBlock];
        alignas(64) double cv[kPhaseBlock];
        alignas(64) double sv[kPhaseBlock];
        const std::size_t base = static_cast<std::size_t>(blk) * kPhaseBlock;
        const std::size_t len = std::min(kPhaseBlock, amps.size() - base);
        for (std::size_t k = 0; k < len; ++k) ang[k] = -angle * e[base + k];
        sincos_batch(ang, cv, sv, len);
        for (std::size_t k = 0; k < len; ++k) {
            const double r = a[base + k].real(), m = a[base + k].imag();
            a[base + k] = {r * cv[k] - m * sv[k], r * sv[k] + m * cv[k]};
        }
    }
}

void diagonal_energies(int n_qubits, std::span<const double> fields,
                       std::span<const CouplingGraph::Edge> edges, std::span<double> out) {
    const std::int64_t dim = std::int64_t{1} << n_qubits;
    const double* h = fields.data();
#pragma omp parallel for schedule(static)
    for (std::int64_t b = 0; b < dim; ++b) {
        const std::size_t ub = static_cast<std::size_t>(b);
        double e = 0.0;
        for (int i = 0; i < n_qubits; ++i)
            e += (ub >> i) & 1 ? -h[static_cast<std::size_t>(i)] : h[static_cast<std::size_t>(i)];
        for (const auto& edge : edges) {
            const bool anti = (((ub >> edge.i) ^ (ub >> edge.j)) & 1) != 0;
            e += anti ? -edge.weight : edge.weight;
        }
        out[ub] = e;
    }
}

template <typename PerElement>
static double blocked_sum(std::size_t dim, PerElement&& value) {
    const std::int64_t n_blocks = static_cast<std::int64_t>(
        (dim + static_cast<std::size_t>(kRedBlock) - 1) / static_cast<std::size_t>(kRedBlock));
    std::vector<double> partial(static_cast<std::size_t>(n_blocks));
#pragma omp parallel for schedule(static)
    for (std::int64_t blk = 0; blk < n_blocks; ++blk) {
        const std::size_t lo = static_cast<std::size_t>(blk) * static_cast<std::size_t>(kRedBlock);
        const std::size_t hi = std::min(dim, lo + static_cast<std::size_t>(kRedBlock));
        double acc = 0.0;
        for (std::size_t b = lo; b < hi; ++b) acc += value(b);
        partial[static_cast<std::size_t>(blk)] = acc;
    }
    double total = 0.0;
    for (double p : partial) total += p;
    return total;
}

double norm_sq(std::span<const cplx> amps) {
    const cplx* a = amps.data();
    return blocked_sum(amps.size(), [a](std::size_t b) {
        return a[b].real() * a[b].real() + a[b].imag() * a[b].imag();
    });
}

double expect_z(std::span<const cplx> amps, int qubit) {
    const cplx* a = amps.data();
    const std::size_t mask = std::size_t{1} << qubit;
    return blocked_sum(amps.size(), [a, mask](std::size_t b) {
        const double p = a[b].real() * a[b].real() + a[b].imag() * a[b].imag();
        return (b & mask) ? -p : p;
    });
}

double expect_zz(std::span<const cplx> amps, int qubit_i, int qubit_j) {
    const cplx* a = amps.data();
    const std::size_t mi = std::size_t{1} << qubit_i;
    const std::size_t mj = std::size_t{1} << qubit_j;
    return blocked_sum(amps.size(), [a, mi, mj](std::size_t b) {
        const double p = a[b].real() * a[b].real() + a[b].imag() * a[b].imag();
        const bool anti = ((b & mi) != 0) != ((b & mj) != 0);
        return anti ? -p : p;
    });
}

} // namespace openmp
} // namespace quenchmap::kernels
