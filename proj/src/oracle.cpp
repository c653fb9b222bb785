#include "quenchmap/oracle.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "quenchmap/quench.hpp"
#include "quenchmap/rng.hpp"

namespace quenchmap::oracle {

namespace {

using Mat2 = std::array<cplx, 4>; // column-major 2x2

constexpr Mat2 kId{cplx(1), cplx(0), cplx(0), cplx(1)};
constexpr Mat2 kSigmaX{cplx(0), cplx(1), cplx(1), cplx(0)};
constexpr Mat2 kSigmaZ{cplx(1), cplx(0), cplx(0), cplx(-1)};

/// Column-major Kronecker product (a: da x da, b: db x db).
std::vector<cplx> kron(const std::vector<cplx>& a, std::size_t da, std::span<const cplx> b,
                       std::size_t db) {
    const std::size_t d = da * db;
    std::vector<cplx> out(d * d);
    for (std::size_t ca = 0; ca < da; ++ca)
        for (std::size_t ra = 0; ra < da; ++ra) {
            const cplx v = a[ra + ca * da];
            for (std::size_t cb = 0; cb < db; ++cb)
                for (std::size_t rb = 0; rb < db; ++rb)
                    out[(ra * db + rb) + (ca * db + cb) * d] = v * b[rb + cb * db];
        }
    return out;
}

/// Tensor product over all qubits, placing `gate` on the qubits listed in
/// `targets` and identity elsewhere. Qubit k owns bit k of the basis index,
/// so the chain runs from the top qubit down.
std::vector<cplx> operator_chain(int n_qubits, std::span<const int> targets) {
    std::vector<cplx> m{cplx(1)};
    std::size_t dim = 1;
    for (int k = n_qubits - 1; k >= 0; --k) {
        const bool hit = std::find(targets.begin(), targets.end(), k) != targets.end();
        m = kron(m, dim, hit ? std::span<const cplx>(kSigmaZ) : std::span<const cplx>(kId), 2);
        dim *= 2;
    }
    return m;
}

std::vector<cplx> sigma_x_sum(int n_qubits) {
    const std::size_t dim = std::size_t{1} << n_qubits;
    std::vector<cplx> out(dim * dim, cplx(0));
    for (int q = 0; q < n_qubits; ++q) {
        std::vector<cplx> m{cplx(1)};
        std::size_t d = 1;
        for (int k = n_qubits - 1; k >= 0; --k) {
            m = kron(m, d, k == q ? std::span<const cplx>(kSigmaX) : std::span<const cplx>(kId), 2);
            d *= 2;
        }
        for (std::size_t i = 0; i < out.size(); ++i) out[i] += m[i];
    }
    return out;
}

std::vector<cplx> problem_hamiltonian(const IsingInstance& instance) {
    const std::size_t dim = std::size_t{1} << instance.n;
    std::vector<cplx> out(dim * dim, cplx(0));
    for (int q = 0; q < instance.n; ++q) {
        const int t[1] = {q};
        const auto m = operator_chain(instance.n, t);
        const double h = instance.fields[static_cast<std::size_t>(q)];
        for (std::size_t i = 0; i < out.size(); ++i) out[i] += h * m[i];
    }
    for (const auto& e : instance.couplings.edges) {
        const int t[2] = {e.i, e.j};
        const auto m = operator_chain(instance.n, t);
        for (std::size_t i = 0; i < out.size(); ++i) out[i] += e.weight * m[i];
    }
    return out;
}

/// y += coeff * M x, column-major dense.
void add_matvec(std::span<const cplx> m, std::span<const cplx> x, cplx coeff,
                std::span<cplx> y) {
    const std::size_t dim = x.size();
    for (std::size_t c = 0; c < dim; ++c) {
        const cplx xc = coeff * x[c];
        const cplx* col = m.data() + c * dim;
        for (std::size_t r = 0; r < dim; ++r) y[r] += col[r] * xc;
    }
}

} // namespace

std::vector<cplx> assemble_hamiltonian(const IsingInstance& instance,
                                       const AnnealSchedule& schedule, double s) {
    if (instance.n < 1 || instance.n > 10)
        throw std::runtime_error("oracle: qubit count out of range for dense assembly");
    if (instance.fields.size() != static_cast<std::size_t>(instance.n))
        throw std::runtime_error("oracle: field count does not match qubit count");
    const Envelopes env = evaluate(schedule, s);
    std::vector<cplx> h = problem_hamiltonian(instance);
    for (auto& v : h) v *= env.b;
    const std::vector<cplx> hx = sigma_x_sum(instance.n);
    for (std::size_t i = 0; i < h.size(); ++i) h[i] -= env.a * hx[i];
    return h;
}

std::vector<cplx> integrate_schroedinger(const IsingInstance& instance,
                                         const AnnealSchedule& schedule, double tau_ns,
                                         std::vector<cplx> psi0, double dt_ns) {
    const std::size_t dim = std::size_t{1} << instance.n;
    if (psi0.size() != dim) throw std::runtime_error("oracle: state size mismatch");
    if (tau_ns == 0.0) return psi0;
    if (tau_ns < 0.0 || dt_ns <= 0.0) throw std::runtime_error("oracle: bad time arguments");

    const std::vector<cplx> hx = sigma_x_sum(instance.n);
    const std::vector<cplx> hz = problem_hamiltonian(instance);

    // d|psi>/dt = -i H(s) |psi| with H = -A(s) * sum sigma^x + B(s) * H_z.
    auto rhs = [&](double t, std::span<const cplx> in, std::span<cplx> out) {
        const double s = std::clamp(t / tau_ns, 0.0, 1.0);
        const Envelopes env = evaluate(schedule, s);
        std::fill(out.begin(), out.end(), cplx(0));
        add_matvec(hx, in, cplx(0.0, env.a), out);
        add_matvec(hz, in, cplx(0.0, -env.b), out);
    };

    std::vector<cplx> k1(dim), k2(dim), k3(dim), k4(dim), tmp(dim);
    const auto n_steps = static_cast<std::size_t>(std::ceil(tau_ns / dt_ns));
    for (std::size_t step = 0; step < n_steps; ++step) {
        const double t0 = std::min(static_cast<double>(step) * dt_ns, tau_ns);
        const double h = std::min(dt_ns, tau_ns - t0);
        if (h <= 0.0) break;

        rhs(t0, psi0, k1);
        for (std::size_t i = 0; i < dim; ++i) tmp[i] = psi0[i] + 0.5 * h * k1[i];
        rhs(t0 + 0.5 * h, tmp, k2);
        for (std::size_t i = 0; i < dim; ++i) tmp[i] = psi0[i] + 0.5 * h * k2[i];
        rhs(t0 + 0.5 * h, tmp, k3);
        for (std::size_t i = 0; i < dim; ++i) tmp[i] = psi0[i] + h * k3[i];
        rhs(t0 + h, tmp, k4);
        for (std::size_t i = 0; i < dim; ++i)
            psi0[i] += (h / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    return psi0;
}

double expect_z_brute(std::span<const cplx> amps, int n_qubits, int qubit) {
    if (qubit < 0 || qubit >= n_qubits) throw std::runtime_error("oracle: qubit out of range");
    double acc = 0.0;
    for (std::size_t b = 0; b < amps.size(); ++b) {
        const double z = ((b >> qubit) & 1u) ? -1.0 : 1.0;
        acc += z * std::norm(amps[b]);
    }
    return acc;
}

double expect_zz_brute(std::span<const cplx> amps, int n_qubits, int qubit_i, int qubit_j) {
    if (qubit_i < 0 || qubit_i >= n_qubits || qubit_j < 0 || qubit_j >= n_qubits)
        throw std::runtime_error("oracle: qubit out of range");
    double acc = 0.0;
    for (std::size_t b = 0; b < amps.size(); ++b) {
        const double zi = ((b >> qubit_i) & 1u) ? -1.0 : 1.0;
        const double zj = ((b >> qubit_j) & 1u) ? -1.0 : 1.0;
        acc += zi * zj * std::norm(amps[b]);
    }
    return acc;
}

EigenPair jacobi_lowest_eigenpair(std::vector<cplx> matrix, std::size_t dim) {
    if (matrix.size() != dim * dim) throw std::runtime_error("oracle: matrix size mismatch");
    auto at = [&](std::size_t r, std::size_t c) -> cplx& { return matrix[r + c * dim]; };

    std::vector<cplx> v(dim * dim, cplx(0));
    for (std::size_t i = 0; i < dim; ++i) v[i + i * dim] = cplx(1);

    double scale = 0.0;
    for (const auto& x : matrix) scale += std::norm(x);
    scale = std::sqrt(scale);
    const double stop = 1e-13 * std::max(scale, 1.0);

    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t c = 0; c < dim; ++c)
            for (std::size_t r = 0; r < dim; ++r)
                if (r != c) off += std::norm(at(r, c));
        if (std::sqrt(off) <= stop) break;

        for (std::size_t p = 0; p < dim; ++p)
            for (std::size_t q = p + 1; q < dim; ++q) {
                const cplx apq = at(p, q);
                const double mag = std::abs(apq);
                if (mag < 1e-300) continue;
                const cplx phase = apq / mag;

                // Rotation angle from the real symmetric form after the phase
                // is factored out of the off-diagonal entry.
                const double app = at(p, p).real();
                const double aqq = at(q, q).real();
                const double tau = (aqq - app) / (2.0 * mag);
                const double t = tau >= 0.0 ? 1.0 / (tau + std::sqrt(1.0 + tau * tau))
                                            : -1.0 / (-tau + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const cplx s = t * c * phase;       // G[p][q]
                const cplx sc = std::conj(s);

                // Columns of A and of the accumulated eigenvector matrix.
                for (std::size_t r = 0; r < dim; ++r) {
                    const cplx mp = at(r, p), mq = at(r, q);
                    at(r, p) = c * mp - sc * mq;
                    at(r, q) = s * mp + c * mq;
                    const cplx vp = v[r + p * dim], vq = v[r + q * dim];
                    v[r + p * dim] = c * vp - sc * vq;
                    v[r + q * dim] = s * vp + c * vq;
                }
                // Rows of A (left multiplication by the adjoint).
                for (std::size_t col = 0; col < dim; ++col) {
                    const cplx mp = at(p, col), mq = at(q, col);
                    at(p, col) = c * mp - s * mq;
                    at(q, col) = sc * mp + c * mq;
                }
            }
    }

    std::size_t best = 0;
    for (std::size_t i = 1; i < dim; ++i)
        if (at(i, i).real() < at(best, best).real()) best = i;

    EigenPair pair;
    pair.value = at(best, best).real();
    pair.vector.resize(dim);
    for (std::size_t r = 0; r < dim; ++r) pair.vector[r] = v[r + best * dim];
    return pair;
}

namespace {

bool report(std::ostream& out, const std::string& name, bool ok, double value, double limit) {
    out << (ok ? "[PASS] " : "[FAIL] ") << name << " (" << value << ", limit " << limit << ")\n";
    return ok;
}

} // namespace

bool run_oracle_suite(int n_qubits, std::uint64_t seed, std::ostream& out) {
    if (n_qubits < 1 || n_qubits > 6)
        throw std::runtime_error("oracle: suite supports 1..6 qubits");

    Rng rng(seed);
    IsingInstance inst;
    inst.n = n_qubits;
    inst.couplings.n = n_qubits;
    for (int i = 0; i < n_qubits; ++i) inst.fields.push_back(3.0 * rng.uniform01() - 1.5);
    for (int i = 0; i + 1 < n_qubits; ++i)
        inst.couplings.edges.push_back({i, i + 1, 1.8 * rng.uniform01() - 0.9});

    AnnealSchedule schedule;
    schedule.tau_ns = 1.5;
    bool all_ok = true;

    {
        // Production expectation kernels against exhaustive summation.
        StateVector psi;
        psi.n_qubits = n_qubits;
        psi.amps.resize(std::size_t{1} << n_qubits);
        double norm = 0.0;
        for (auto& a : psi.amps) {
            a = cplx(rng.normal(), rng.normal());
            norm += std::norm(a);
        }
        for (auto& a : psi.amps) a /= std::sqrt(norm);

        double diff = 0.0;
        for (int q = 0; q < n_qubits; ++q)
            diff = std::max(diff, std::abs(expect_z(psi, q) - expect_z_brute(psi.amps, n_qubits, q)));
        for (int i = 0; i < n_qubits; ++i)
            for (int j = i + 1; j < n_qubits; ++j)
                diff = std::max(diff, std::abs(expect_zz(psi, i, j) -
                                               expect_zz_brute(psi.amps, n_qubits, i, j)));
        all_ok &= report(out, "expectation kernels vs brute-force sum", diff <= 1e-12, diff, 1e-12);
    }

    {
        // Fast diagonal energies against the assembled problem Hamiltonian.
        const std::vector<double> energies = diagonal_energies(inst);
        const std::vector<cplx> hz = problem_hamiltonian(inst);
        const std::size_t dim = energies.size();
        double diff = 0.0;
        for (std::size_t b = 0; b < dim; ++b)
            diff = std::max(diff, std::abs(energies[b] - hz[b + b * dim].real()));
        all_ok &= report(out, "diagonal energies vs assembled Hamiltonian", diff <= 1e-12, diff,
                         1e-12);
    }

    double trotter_norm = 0.0;
    {
        // Trotterized quench against a fixed-step RK4 integration of the
        // Schroedinger equation, compared through every z expectation.
        QuenchConfig config;
        config.schedule = schedule;
        config.dt_ns = 2e-4;
        EvolveStats stats;
        const StateVector psi_t = evolve(inst, config, &stats);
        trotter_norm = stats.final_norm;

        const StateVector plus = plus_state(n_qubits);
        const std::vector<cplx> psi_r =
            integrate_schroedinger(inst, schedule, schedule.tau_ns, plus.amps, 2e-4);

        double diff = 0.0;
        for (int q = 0; q < n_qubits; ++q)
            diff = std::max(diff, std::abs(expect_z(psi_t, q) -
                                           expect_z_brute(psi_r, n_qubits, q)));
        for (int i = 0; i < n_qubits; ++i)
            for (int j = i + 1; j < n_qubits; ++j)
                diff = std::max(diff, std::abs(expect_zz(psi_t, i, j) -
                                               expect_zz_brute(psi_r, n_qubits, i, j)));
        all_ok &= report(out, "trotterized quench vs RK4 integration", diff <= 1e-5, diff, 1e-5);
    }

    all_ok &= report(out, "quench preserves norm", std::abs(trotter_norm - 1.0) <= 1e-9,
                     std::abs(trotter_norm - 1.0), 1e-9);

    {
        // Production ground-state solver against cyclic Jacobi on the dense
        // matrix, at a point where driver and problem both contribute.
        const GroundState gs = exact_ground_state(inst, schedule, 0.7);
        const EigenPair ref =
            jacobi_lowest_eigenpair(assemble_hamiltonian(inst, schedule, 0.7),
                                    std::size_t{1} << n_qubits);
        const double ediff = std::abs(gs.energy - ref.value);

        cplx dot(0.0);
        for (std::size_t b = 0; b < ref.vector.size(); ++b)
            dot += std::conj(ref.vector[b]) * gs.state.amps[b];
        const double overlap_err = 1.0 - std::norm(dot);
        all_ok &= report(out, "ground-state energy vs Jacobi", ediff <= 1e-9, ediff, 1e-9);
        all_ok &= report(out, "ground-state overlap vs Jacobi", overlap_err <= 1e-9, overlap_err,
                         1e-9);
    }

    {
        // A vanishingly short quench must leave the driver ground state (all
        // z expectations zero) untouched.
        QuenchConfig config;
        config.schedule = schedule;
        config.schedule.tau_ns = 1e-6;
        const StateVector psi = evolve(inst, config);
        double zmax = 0.0;
        for (int q = 0; q < n_qubits; ++q) zmax = std::max(zmax, std::abs(expect_z(psi, q)));
        all_ok &= report(out, "sudden quench keeps zero magnetization", zmax <= 1e-5, zmax, 1e-5);
    }

    {
        const Envelopes start = evaluate(schedule, 0.0);
        const Envelopes end = evaluate(schedule, 1.0);
        const double worst = std::max(std::abs(start.b), std::abs(end.a));
        all_ok &= report(out, "schedule endpoints pure driver / pure problem", worst == 0.0, worst,
                         0.0);
    }

    return all_ok;
}

} // namespace quenchmap::oracle
