#include "quenchmap/quench.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace quenchmap {

StateVector plus_state(int n_qubits) {
    if (n_qubits < 0 || n_qubits > 30) throw std::runtime_error("plus_state: bad qubit count");
    StateVector psi;
    psi.n_qubits = n_qubits;
    const std::size_t dim = std::size_t{1} << n_qubits;
    psi.amps.assign(dim, cplx(1.0 / std::sqrt(static_cast<double>(dim)), 0.0));
    return psi;
}

StateVector evolve(const IsingInstance& instance, const QuenchConfig& config, EvolveStats* stats) {
    if (instance.n < 1 || instance.n > config.max_qubits)
        throw std::runtime_error("evolve: qubit count above simulable cutoff");
    if (instance.fields.size() != static_cast<std::size_t>(instance.n))
        throw std::runtime_error("evolve: field count != qubit count");
    if (config.dt_ns <= 0.0) throw std::runtime_error("evolve: dt must be positive");

    StateVector psi = plus_state(instance.n);
    const double tau = config.schedule.tau_ns;
    if (tau == 0.0) {
        if (stats) *stats = {0, 1.0, 0.0};
        return psi;
    }
    config.schedule.validate();

    const std::size_t dim = psi.dim();
    const bool fast = kernels::use_openmp(config.backend, dim);
    auto mixer = fast ? kernels::openmp::apply_mixer_layer : kernels::serial::apply_mixer_layer;
    auto phase = fast ? kernels::openmp::apply_diagonal_phase : kernels::serial::apply_diagonal_phase;
    auto energize = fast ? kernels::openmp::diagonal_energies : kernels::serial::diagonal_energies;
    auto norm = fast ? kernels::openmp::norm_sq : kernels::serial::norm_sq;

    std::vector<double> energies(dim);
    energize(instance.n, instance.fields, instance.couplings.edges, energies);

    // Symmetric second-order steps with envelopes at each step midpoint. The
    // closing mixer half of one step and the opening half of the next share
    // the same generator, so they are applied as one fused layer. Norms are
    // monitored per step only when the caller asked for stats; the pending
    // mixer is unitary, so measuring before it covers the step boundary.
    const auto n_steps = static_cast<std::size_t>(std::ceil(tau / config.dt_ns));
    double max_drift = 0.0;
    double pending_theta = 0.0;
    for (std::size_t k = 0; k < n_steps; ++k) {
        const double t0 = static_cast<double>(k) * config.dt_ns;
        const double t1 = std::min(t0 + config.dt_ns, tau);
        const double dt = t1 - t0;
        const Envelopes env = evaluate(config.schedule, (t0 + t1) / (2.0 * tau));
        const double half_mix = env.a * dt / 2.0;
        if (pending_theta + half_mix != 0.0)
            mixer(psi.amps, psi.n_qubits, pending_theta + half_mix);
        if (env.b * dt != 0.0) phase(psi.amps, energies, env.b * dt);
        pending_theta = half_mix;
        if (stats) max_drift = std::max(max_drift, std::abs(norm(psi.amps) - 1.0));
    }
    if (pending_theta != 0.0) mixer(psi.amps, psi.n_qubits, pending_theta);

    if (stats) {
        stats->n_steps = n_steps;
        stats->final_norm = norm(psi.amps);
        stats->max_norm_drift = std::max(max_drift, std::abs(stats->final_norm - 1.0));
    }
    return psi;
}

double expect_z(const StateVector& state, int qubit) {
    if (qubit < 0 || qubit >= state.n_qubits) throw std::runtime_error("expect_z: bad qubit index");
    return kernels::use_openmp(kernels::Backend::automatic, state.dim())
               ? kernels::openmp::expect_z(state.amps, qubit)
               : kernels::serial::expect_z(state.amps, qubit);
}

double expect_zz(const StateVector& state, int qubit_i, int qubit_j) {
    if (qubit_i < 0 || qubit_i >= state.n_qubits || qubit_j < 0 || qubit_j >= state.n_qubits ||
        qubit_i == qubit_j)
        throw std::runtime_error("expect_zz: bad qubit pair");
    return kernels::use_openmp(kernels::Backend::automatic, state.dim())
               ? kernels::openmp::expect_zz(state.amps, qubit_i, qubit_j)
               : kernels::serial::expect_zz(state.amps, qubit_i, qubit_j);
}

std::vector<std::uint64_t> sample_bitstrings(const StateVector& state, int n_shots,
                                             std::uint64_t seed) {
    if (n_shots < 1) throw std::runtime_error("sample: shots must be positive");
    std::vector<double> cdf(state.dim() + 1, 0.0);
    for (std::size_t b = 0; b < state.dim(); ++b)
        cdf[b + 1] = cdf[b] + std::norm(state.amps[b]);
    const double total = cdf.back();
    if (total <= 0.0) throw std::runtime_error("sample: zero-norm state");

    Rng rng(seed);
    std::vector<std::uint64_t> out(static_cast<std::size_t>(n_shots));
    for (auto& shot : out) {
        const double u = rng.uniform01() * total;
        const auto it = std::upper_bound(cdf.begin() + 1, cdf.end(), u);
        shot = static_cast<std::uint64_t>(std::min<std::ptrdiff_t>(
            it - (cdf.begin() + 1), static_cast<std::ptrdiff_t>(state.dim()) - 1));
    }
    return out;
}

std::vector<double> estimate_z_from_samples(std::span<const std::uint64_t> samples, int n_qubits) {
    if (samples.empty()) throw std::runtime_error("estimate_z: no samples");
    std::vector<double> z(static_cast<std::size_t>(n_qubits), 0.0);
    for (std::uint64_t b : samples)
        for (int i = 0; i < n_qubits; ++i)
            z[static_cast<std::size_t>(i)] += (b >> i) & 1 ? -1.0 : 1.0;
    for (auto& v : z) v /= static_cast<double>(samples.size());
    return z;
}

GroundState exact_ground_state(const IsingInstance& instance, const AnnealSchedule& schedule,
                               double s, int max_qubits) {
    if (instance.n < 1 || instance.n > max_qubits)
        throw std::runtime_error("ground_state: qubit count above dense-solver cutoff");
    const std::size_t dim = std::size_t{1} << instance.n;
    const Envelopes env = evaluate(schedule, s);

    std::vector<double> energies(dim);
    kernels::serial::diagonal_energies(instance.n, instance.fields, instance.couplings.edges,
                                       energies);

    GroundState gs;
    gs.state.n_qubits = instance.n;
    if (env.a == 0.0) {
        // Diagonal Hamiltonian: the ground state is the lowest-energy basis
        // state (ties go to the lowest index).
        std::size_t best = 0;
        for (std::size_t b = 1; b < dim; ++b)
            if (energies[b] < energies[best]) best = b;
        gs.energy = env.b * energies[best];
        gs.state.amps.assign(dim, cplx(0.0, 0.0));
        gs.state.amps[best] = cplx(1.0, 0.0);
        return gs;
    }

    // The interpolating Hamiltonian is real symmetric in the computational
    // basis: B*diag(energies) minus A on every single-bit-flip pair.
    Eigen::MatrixXd ham = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(dim),
                                                static_cast<Eigen::Index>(dim));
    for (std::size_t b = 0; b < dim; ++b) {
        ham(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(b)) = env.b * energies[b];
        for (int q = 0; q < instance.n; ++q) {
            const std::size_t flipped = b ^ (std::size_t{1} << q);
            ham(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(flipped)) = -env.a;
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(ham);
    if (solver.info() != Eigen::Success) throw std::runtime_error("ground_state: eigensolver failed");

    gs.energy = solver.eigenvalues()(0);
    const auto vec = solver.eigenvectors().col(0);
    gs.state.amps.resize(dim);
    for (std::size_t b = 0; b < dim; ++b)
        gs.state.amps[b] = cplx(vec(static_cast<Eigen::Index>(b)), 0.0);
    return gs;
}

static constexpr char kStateMagic[4] = {'Q', 'S', 'V', '1'};

void save_state(const StateVector& state, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("state: cannot write " + path);
    out.write(kStateMagic, 4);
    const std::int32_t n = state.n_qubits;
    out.write(reinterpret_cast<const char*>(&n), sizeof n);
    out.write(reinterpret_cast<const char*>(state.amps.data()),
              static_cast<std::streamsize>(state.amps.size() * sizeof(cplx)));
    if (!out) throw std::runtime_error("state: write failed for " + path);
}

StateVector load_state(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("state: cannot open " + path);
    char magic[4];
    std::int32_t n = -1;
    in.read(magic, 4);
    in.read(reinterpret_cast<char*>(&n), sizeof n);
    if (!in || std::memcmp(magic, kStateMagic, 4) != 0 || n < 0 || n > 30)
        throw std::runtime_error("state: " + path + " is not a QSV1 dump");
    StateVector state;
    state.n_qubits = n;
    state.amps.resize(std::size_t{1} << n);
    in.read(reinterpret_cast<char*>(state.amps.data()),
            static_cast<std::streamsize>(state.amps.size() * sizeof(cplx)));
    if (!in) throw std::runtime_error("state: " + path + " is truncated");
    return state;
}

} // namespace quenchmap
