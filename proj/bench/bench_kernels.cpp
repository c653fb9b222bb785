// Micro-benchmark comparing the serial reference kernels against the
// OpenMP/vectorized fast path, plus a whole-quench timing at each size.
// Usage: bench_kernels [n_qubits ...]   (default: 8 12)

#include <chrono>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include "quenchmap/kernels.hpp"
#include "quenchmap/quench.hpp"
#include "quenchmap/rng.hpp"

using namespace quenchmap;
using kernels::cplx;

namespace {

double now_s() {
    return std::chrono::duration<double>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

/// Seconds per call, amortized over enough repetitions to fill ~50 ms.
template <typename F>
double per_call(F&& f) {
    std::size_t reps = 1;
    for (;;) {
        const double t0 = now_s();
        for (std::size_t r = 0; r < reps; ++r) f();
        const double dt = now_s() - t0;
        if (dt > 0.05 || reps > (std::size_t{1} << 24)) return dt / static_cast<double>(reps);
        reps *= 4;
    }
}

double max_diff(std::span<const cplx> a, std::span<const cplx> b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

void print_row(const char* op, int n, double serial_s, double fast_s, double diff) {
    std::printf("%-18s n=%-3d %12.3f us %12.3f us %8.2fx   max|diff| %.2e\n", op, n,
                serial_s * 1e6, fast_s * 1e6, serial_s / fast_s, diff);
}

void bench_size(int n) {
    const std::size_t dim = std::size_t{1} << n;
    Rng rng(n);

    IsingInstance inst;
    inst.n = n;
    inst.couplings.n = n;
    for (int i = 0; i < n; ++i) inst.fields.push_back(rng.uniform(-2.0, 2.0));
    for (int i = 0; i + 1 < n; ++i) inst.couplings.edges.push_back({i, i + 1, rng.uniform(-1.0, 1.0)});

    std::vector<double> energies(dim);
    kernels::serial::diagonal_energies(n, inst.fields, inst.couplings.edges, energies);

    std::vector<cplx> base(dim);
    double norm = 0.0;
    for (auto& a : base) {
        a = cplx(rng.normal(), rng.normal());
        norm += std::norm(a);
    }
    for (auto& a : base) a /= std::sqrt(norm);

    // Gates are unitary, so repeated in-place application keeps the state
    // usable; both paths start from the same state and are diffed at the end.
    std::vector<cplx> s_state = base, f_state = base;
    print_row("mixer layer", n,
              per_call([&] { kernels::serial::apply_mixer_layer(s_state, n, 0.03); }),
              per_call([&] { kernels::openmp::apply_mixer_layer(f_state, n, 0.03); }),
              max_diff(s_state, f_state));

    s_state = base;
    f_state = base;
    print_row("diagonal phase", n,
              per_call([&] { kernels::serial::apply_diagonal_phase(s_state, energies, 0.05); }),
              per_call([&] { kernels::openmp::apply_diagonal_phase(f_state, energies, 0.05); }),
              max_diff(s_state, f_state));

    std::vector<double> s_energy(dim), f_energy(dim);
    const double t_se = per_call([&] {
        kernels::serial::diagonal_energies(n, inst.fields, inst.couplings.edges, s_energy);
    });
    const double t_fe = per_call([&] {
        kernels::openmp::diagonal_energies(n, inst.fields, inst.couplings.edges, f_energy);
    });
    double e_diff = 0.0;
    for (std::size_t b = 0; b < dim; ++b)
        e_diff = std::max(e_diff, std::abs(s_energy[b] - f_energy[b]));
    print_row("diag energies", n, t_se, t_fe, e_diff);

    double s_val = 0.0, f_val = 0.0;
    print_row("norm_sq", n, per_call([&] { s_val = kernels::serial::norm_sq(base); }),
              per_call([&] { f_val = kernels::openmp::norm_sq(base); }),
              std::abs(s_val - f_val));

    print_row("expect_z", n, per_call([&] { s_val = kernels::serial::expect_z(base, n / 2); }),
              per_call([&] { f_val = kernels::openmp::expect_z(base, n / 2); }),
              std::abs(s_val - f_val));

    print_row("expect_zz", n,
              per_call([&] { s_val = kernels::serial::expect_zz(base, 0, n - 1); }),
              per_call([&] { f_val = kernels::openmp::expect_zz(base, 0, n - 1); }),
              std::abs(s_val - f_val));

    // Whole quench, both backends: tau = 1 ns at dt = 1e-3 is 1000 steps.
    QuenchConfig config;
    config.schedule.tau_ns = 1.0;
    config.dt_ns = 1e-3;
    config.backend = kernels::Backend::serial;
    const double t0 = now_s();
    const StateVector slow = evolve(inst, config);
    const double t_serial = now_s() - t0;
    config.backend = kernels::Backend::openmp;
    const double t1 = now_s();
    const StateVector fast = evolve(inst, config);
    const double t_fast = now_s() - t1;
    std::printf("%-18s n=%-3d %12.3f ms %12.3f ms %8.2fx   max|diff| %.2e\n\n",
                "evolve (1000 st)", n, t_serial * 1e3, t_fast * 1e3, t_serial / t_fast,
                max_diff(slow.amps, fast.amps));
}

} // namespace

int main(int argc, char** argv) {
    std::vector<int> sizes;
    for (int i = 1; i < argc; ++i) sizes.push_back(std::atoi(argv[i]));
    if (sizes.empty()) sizes = {8, 12};

    std::printf("%-18s %-5s %15s %15s %9s\n", "op", "", "serial", "openmp", "speedup");
    for (int n : sizes) {
        if (n < 1 || n > 24) {
            std::fprintf(stderr, "skipping out-of-range qubit count %d\n", n);
            continue;
        }
        bench_size(n);
    }
    return 0;
}
