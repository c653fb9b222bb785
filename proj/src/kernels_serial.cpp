#include "quenchmap/kernels.hpp"

#include <cmath>

namespace quenchmap::kernels::serial {

void apply_mixer_layer(std::span<cplx> amps, int n_qubits, double theta) {
    const double c = std::cos(theta);
    const cplx is(0.0, std::sin(theta));
    const std::size_t half = amps.size() >> 1;
    for (int q = 0; q < n_qubits; ++q) {
        const std::size_t mask = std::size_t{1} << q;
        const std::size_t lo = mask - 1;
        const std::size_t hi = ~lo;
        for (std::size_t k = 0; k < half; ++k) {
            const std::size_t i0 = ((k & hi) << 1) | (k & lo);
            const std::size_t i1 = i0 | mask;
            const cplx a0 = amps[i0], a1 = amps[i1];
            amps[i0] = c * a0 + is * a1;
            amps[i1] = is * a0 + c * a1;
        }
    }
}

void apply_diagonal_phase(std::span<cplx> amps, std::span<const double> energies, double angle) {
    for (std::size_t b = 0; b < amps.size(); ++b)
        amps[b] *= std::polar(1.0, -angle * energies[b]);
}

void diagonal_energies(int n_qubits, std::span<const double> fields,
                       std::span<const CouplingGraph::Edge> edges, std::span<double> out) {
    const std::size_t dim = std::size_t{1} << n_qubits;
    for (std::size_t b = 0; b < dim; ++b) {
        double e = 0.0;
        for (int i = 0; i < n_qubits; ++i)
            e += (b >> i) & 1 ? -fields[static_cast<std::size_t>(i)]
                              : fields[static_cast<std::size_t>(i)];
        for (const auto& edge : edges) {
            const bool anti = (((b >> edge.i) ^ (b >> edge.j)) & 1) != 0;
            e += anti ? -edge.weight : edge.weight;
        }
        out[b] = e;
    }
}

double norm_sq(std::span<const cplx> amps) {
    double total = 0.0;
    for (const cplx& a : amps) total += a.real() * a.real() + a.imag() * a.imag();
    return total;
}

double expect_z(std::span<const cplx> amps, int qubit) {
    const std::size_t mask = std::size_t{1} << qubit;
    double total = 0.0;
    for (std::size_t b = 0; b < amps.size(); ++b) {
        const double p = amps[b].real() * amps[b].real() + amps[b].imag() * amps[b].imag();
        total += (b & mask) ? -p : p;
    }
    return total;
}

double expect_zz(std::span<const cplx> amps, int qubit_i, int qubit_j) {
    const std::size_t mi = std::size_t{1} << qubit_i;
    const std::size_t mj = std::size_t{1} << qubit_j;
    double total = 0.0;
    for (std::size_t b = 0; b < amps.size(); ++b) {
        const double p = amps[b].real() * amps[b].real() + amps[b].imag() * amps[b].imag();
        const bool anti = ((b & mi) != 0) != ((b & mj) != 0);
        total += anti ? -p : p;
    }
    return total;
}

} // namespace quenchmap::kernels::serial
