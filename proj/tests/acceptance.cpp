// Acceptance gate: one check per shipping criterion, each printed as a
// single [PASS]/[FAIL] line with the measured value next to its bound.
// Everything here goes through the public headers; reference values come
// from the independent oracle implementations, not the production kernels.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "quenchmap/config.hpp"
#include "quenchmap/dataset.hpp"
#include "quenchmap/encoding.hpp"
#include "quenchmap/evaluation.hpp"
#include "quenchmap/features.hpp"
#include "quenchmap/gram.hpp"
#include "quenchmap/metrics.hpp"
#include "quenchmap/oracle.hpp"
#include "quenchmap/quench.hpp"
#include "quenchmap/rng.hpp"
#include "quenchmap/svm.hpp"
#include "quenchmap/synth.hpp"

#include "helpers.hpp"

using namespace quenchmap;
using steady = std::chrono::steady_clock;

namespace {

double seconds_since(steady::time_point t0) {
    return std::chrono::duration<double>(steady::now() - t0).count();
}

bool report(int id, const std::string& what, bool ok, const std::string& detail) {
    std::cout << (ok ? "[PASS]" : "[FAIL]") << " criterion " << id << ": " << what;
    if (!detail.empty()) std::cout << " (" << detail << ")";
    std::cout << "\n" << std::flush;
    return ok;
}

std::string fmt(double v, int digits = 3) {
    std::ostringstream out;
    out << std::setprecision(digits) << v;
    return out.str();
}

IsingInstance random_instance(int n, std::uint64_t seed) {
    Rng rng(seed);
    IsingInstance inst;
    inst.n = n;
    for (int i = 0; i < n; ++i) inst.fields.push_back(2.0 * (2.0 * rng.uniform01() - 1.0));
    inst.couplings.n = n;
    for (int i = 0; i + 1 < n; ++i)
        inst.couplings.edges.push_back({i, i + 1, 0.9 * (2.0 * rng.uniform01() - 1.0)});
    return inst;
}

std::vector<double> z_features(const IsingInstance& inst, double tau, double dt) {
    QuenchConfig qc;
    qc.schedule.tau_ns = tau;
    qc.dt_ns = dt;
    const StateVector psi = evolve(inst, qc);
    std::vector<double> z(static_cast<std::size_t>(inst.n));
    for (int q = 0; q < inst.n; ++q) z[static_cast<std::size_t>(q)] = expect_z(psi, q);
    return z;
}

// --- criterion 1: single-qubit quench against a fine-step ODE reference ---

bool criterion1() {
    const auto t0 = steady::now();
    IsingInstance inst;
    inst.n = 1;
    inst.fields = {1.0};
    inst.couplings.n = 1;

    AnnealSchedule sched;
    sched.tau_ns = 10.0;
    QuenchConfig qc;
    qc.schedule = sched;
    qc.dt_ns = 2e-5;
    const double z_trotter = expect_z(evolve(inst, qc), 0);

    const auto ref = oracle::integrate_schroedinger(inst, sched, 10.0, plus_state(1).amps, 1e-4);
    const double z_ode = oracle::expect_z_brute(ref, 1, 0);

    const double diff = std::abs(z_trotter - z_ode);
    const double secs = seconds_since(t0);
    return report(1, "single-qubit quench matches the dt=1e-4 ODE reference",
                  diff < 1e-6 && secs < 1.0,
                  "|dz| " + fmt(diff) + " limit 1e-6, " + fmt(secs, 2) + " s limit 1");
}

// --- criterion 2: halving dt shrinks the error like a second-order method ---

bool criterion2() {
    const auto t0 = steady::now();
    const IsingInstance inst = random_instance(6, 2027);
    const double tau = 2.0, dt = 0.02;
    const auto ref = z_features(inst, tau, dt / 8);

    auto max_err = [&](double step) {
        const auto z = z_features(inst, tau, step);
        double m = 0.0;
        for (std::size_t i = 0; i < z.size(); ++i) m = std::max(m, std::abs(z[i] - ref[i]));
        return m;
    };
    const double coarse = max_err(dt);
    const double fine = max_err(dt / 2);
    const double ratio = coarse / fine;
    const double secs = seconds_since(t0);
    return report(2, "error ratio between dt and dt/2 sits in the second-order window",
                  ratio >= 3.0 && ratio <= 5.0 && secs < 30.0,
                  "ratio " + fmt(ratio) + " window [3,5], errors " + fmt(coarse) + "/" + fmt(fine) +
                      ", " + fmt(secs, 2) + " s limit 30");
}

// --- criterion 3: norm conservation over a long n=10 evolution ---

bool criterion3() {
    const IsingInstance inst = random_instance(10, 4099);
    QuenchConfig qc;
    qc.schedule.tau_ns = 5.0;
    qc.dt_ns = 0.005; // exactly 1000 steps
    EvolveStats stats;
    evolve(inst, qc, &stats);
    return report(3, "1000-step n=10 evolution stays normalized",
                  stats.n_steps == 1000 && stats.max_norm_drift < 1e-9,
                  "steps " + std::to_string(stats.n_steps) + ", max |norm^2-1| " +
                      fmt(stats.max_norm_drift) + " limit 1e-9");
}

// --- criterion 4: slow quenches land in the exact ground state ---

bool criterion4() {
    const auto t0 = steady::now();
    double min_overlap = 1.0;
    int found = 0;
    std::uint64_t seed = 1;
    while (found < 5) {
        const IsingInstance inst = random_instance(4, seed++);
        // keep instances whose problem spectrum is cleanly gapped so the
        // adiabatic theorem has something to hold on to
        std::vector<double> energies = diagonal_energies(inst);
        std::sort(energies.begin(), energies.end());
        if (energies[1] - energies[0] < 0.5) continue;
        ++found;

        QuenchConfig qc;
        qc.schedule.tau_ns = 500.0;
        qc.dt_ns = 0.01;
        const StateVector psi = evolve(inst, qc);
        const GroundState gs = exact_ground_state(inst, qc.schedule, 1.0);
        cplx dot = 0.0;
        for (std::size_t b = 0; b < psi.dim(); ++b)
            dot += std::conj(gs.state.amps[b]) * psi.amps[b];
        min_overlap = std::min(min_overlap, std::norm(dot));
    }
    const double secs = seconds_since(t0);
    return report(4, "tau=500 ns reaches the exact ground state on 5 gapped n=4 instances",
                  min_overlap >= 0.99 && secs < 60.0,
                  "min overlap " + fmt(min_overlap, 6) + " limit 0.99, " + fmt(secs, 2) +
                      " s limit 60");
}

// --- criterion 5: the sudden limit produces no magnetization ---

bool criterion5() {
    double worst = 0.0;
    for (std::uint64_t seed : {11u, 12u, 13u, 14u, 15u}) {
        const auto z = z_features(random_instance(8, seed), 1e-6, 0.01);
        for (double v : z) worst = std::max(worst, std::abs(v));
    }
    return report(5, "tau=1e-6 ns leaves every <sigma^z> at zero", worst < 1e-6,
                  "max |z| " + fmt(worst) + " limit 1e-6");
}

// --- criterion 6: negating the fields negates the z-features ---

bool criterion6() {
    double worst = 0.0;
    for (std::uint64_t seed = 100; seed < 120; ++seed) {
        IsingInstance inst = random_instance(8, seed);
        const auto z = z_features(inst, 2.0, 0.02);
        for (double& h : inst.fields) h = -h;
        const auto zn = z_features(inst, 2.0, 0.02);
        for (std::size_t i = 0; i < z.size(); ++i)
            worst = std::max(worst, std::abs(z[i] + zn[i]));
    }
    return report(6, "field negation negates all z-features on 20 random n=8 instances",
                  worst < 1e-9, "max |z + z'| " + fmt(worst) + " limit 1e-9");
}

// --- criterion 7: expectation kernels against exhaustive summation ---

bool criterion7() {
    double worst = 0.0;
    for (std::uint64_t seed = 7; seed < 17; ++seed) {
        Rng rng(seed);
        StateVector psi;
        psi.n_qubits = 3;
        psi.amps.resize(8);
        double norm = 0.0;
        for (auto& a : psi.amps) {
            a = {rng.normal(), rng.normal()};
            norm += std::norm(a);
        }
        for (auto& a : psi.amps) a /= std::sqrt(norm);

        for (int q = 0; q < 3; ++q)
            worst = std::max(worst, std::abs(expect_z(psi, q) -
                                             oracle::expect_z_brute(psi.amps, 3, q)));
        for (int i = 0; i < 3; ++i)
            for (int j = i + 1; j < 3; ++j)
                worst = std::max(worst, std::abs(expect_zz(psi, i, j) -
                                                 oracle::expect_zz_brute(psi.amps, 3, i, j)));
    }
    return report(7, "expect_z / expect_zz match exhaustive summation", worst <= 1e-12,
                  "max diff " + fmt(worst) + " limit 1e-12");
}

// --- criterion 8: mapped-feature Gram matrices are PSD ---

bool criterion8() {
    double worst_ratio = 0.0; // most negative lambda_min / trace seen
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        Rng rng(seed * 7 + 1);
        Matrix x(30, 8);
        for (auto& v : x.data) v = rng.normal();
        std::vector<int> labels(30);
        for (std::size_t i = 0; i < 30; ++i) labels[i] = static_cast<int>(i % 2);

        CouplingGraph g;
        g.n = 8;
        for (int i = 0; i + 1 < 8; ++i)
            g.edges.push_back({i, i + 1, 0.9 * (2.0 * rng.uniform01() - 1.0)});

        FeatureMapOptions opts;
        opts.quench.schedule.tau_ns = 2.0;
        opts.quench.dt_ns = 0.05;
        const MappedDataset mapped = map_dataset(x, labels, g, opts);
        const Matrix k = gram_linear(mapped.features, mapped.features);

        double trace = 0.0;
        for (std::size_t i = 0; i < 30; ++i) trace += k(i, i);
        std::vector<oracle::cplx> kc(30 * 30);
        for (std::size_t i = 0; i < 30; ++i)
            for (std::size_t j = 0; j < 30; ++j) kc[j * 30 + i] = k(i, j);
        const double lambda_min = oracle::jacobi_lowest_eigenpair(std::move(kc), 30).value;
        worst_ratio = std::min(worst_ratio, lambda_min / trace);
    }
    return report(8, "50 mapped Gram matrices are PSD to within round-off",
                  worst_ratio >= -1e-8,
                  "min lambda_min/trace " + fmt(worst_ratio) + " limit -1e-8");
}

// --- criterion 9: SVM optimality ---

bool criterion9() {
    // two orthogonal points: the dual optimum is alpha=(1,1), bias 0 exactly
    Matrix k2(2, 2);
    k2.data = {1, 0, 0, 1};
    const std::vector<int> y2 = {1, -1};
    SvmOptions opts;
    opts.c = 10.0;
    const SvmModel two = svm_train(k2, y2, opts);
    const bool closed_form = two.alphas[0] == 1.0 && two.alphas[1] == 1.0 && two.bias == 0.0 &&
                             two.duality_gap <= 1e-6;

    // separable blobs: training balanced accuracy 1.0 and clean KKT conditions
    Rng rng(11);
    Matrix x(40, 2);
    std::vector<int> y(40);
    for (std::size_t i = 0; i < 40; ++i) {
        const double center = i < 20 ? 2.0 : -2.0;
        x(i, 0) = center + 0.6 * rng.normal();
        x(i, 1) = center + 0.6 * rng.normal();
        y[i] = i < 20 ? 1 : -1;
    }
    const Matrix k = gram_linear(x, x);
    SvmOptions bopt;
    bopt.c = 1.0;
    const SvmModel model = svm_train(k, y, bopt);
    const SvmPrediction pred = svm_predict(model, k);
    const double bal_acc = compute_metrics(y, pred.labels, pred.decision).accuracy;

    double worst_kkt = 0.0;
    for (std::size_t i = 0; i < model.alphas.size(); ++i) {
        const double margin = static_cast<double>(model.labels[i]) * pred.decision[i] - 1.0;
        if (model.alphas[i] <= 1e-12) worst_kkt = std::max(worst_kkt, -margin);
        else if (model.alphas[i] >= model.c - 1e-12) worst_kkt = std::max(worst_kkt, margin);
        else worst_kkt = std::max(worst_kkt, std::abs(margin));
    }
    worst_kkt = std::max(worst_kkt, 0.0);

    return report(9, "svm reaches closed-form, KKT-clean, separating optima",
                  closed_form && model.duality_gap <= 1e-6 && worst_kkt <= 1e-4 && bal_acc == 1.0,
                  "alphas (" + fmt(two.alphas[0], 17) + "," + fmt(two.alphas[1], 17) + ") bias " +
                      fmt(two.bias, 17) + ", gap " + fmt(model.duality_gap) + " limit 1e-6, kkt " +
                      fmt(worst_kkt) + " limit 1e-4, bal_acc " + fmt(bal_acc));
}

// --- criterion 10: metrics arithmetic ---

bool criterion10() {
    const std::vector<int> truth = {1, -1, 1, -1, 1};
    const std::vector<double> scores = {0.9, -0.8, 0.7, -0.6, 0.5};
    const MetricsReport perfect = compute_metrics(truth, truth, scores);
    const bool all_ones = perfect.accuracy == 1.0 && perfect.accuracy_plain == 1.0 &&
                          perfect.precision == 1.0 && perfect.recall == 1.0 &&
                          perfect.f1 == 1.0 && perfect.auc == 1.0;

    Rng rng(2025);
    std::vector<int> y(1000), pred(1000, 1);
    std::vector<double> s(1000);
    for (std::size_t i = 0; i < 1000; ++i) {
        y[i] = rng.uniform01() < 0.5 ? 1 : -1;
        s[i] = rng.uniform01();
    }
    const double auc = compute_metrics(y, pred, s).auc;

    std::vector<int> yq, pq;
    for (int rep = 0; rep < 5; ++rep) {
        yq.insert(yq.end(), {1, -1, -1, -1});
        pq.insert(pq.end(), {1, 1, 1, 1});
    }
    const MetricsReport quarter = compute_metrics(yq, pq, std::vector<double>(yq.size(), 1.0));
    const bool confusion_exact =
        quarter.recall == 1.0 && quarter.precision == 0.25 && quarter.accuracy == 0.5;

    return report(10, "metrics match hand-counted confusion arithmetic",
                  all_ones && auc >= 0.45 && auc <= 0.55 && confusion_exact,
                  "random auc " + fmt(auc) + " window [0.45,0.55], quarter-prevalence recall " +
                      fmt(quarter.recall) + " precision " + fmt(quarter.precision) +
                      " balanced " + fmt(quarter.accuracy));
}

// --- criterion 11: the cross-validation protocol shape ---

TabularDataset signed_feature_dataset(std::size_t n, std::size_t d, std::uint64_t seed) {
    Rng rng(seed);
    TabularDataset data;
    data.values = Matrix(n, d);
    data.missing.assign(n * d, 0);
    for (std::size_t i = 0; i < n; ++i) {
        data.values(i, 0) = rng.normal();
        data.values(i, 1) = 0.8 * data.values(i, 0) + 0.6 * rng.normal();
        for (std::size_t j = 2; j < d; ++j) data.values(i, j) = rng.normal();
        data.labels.push_back(data.values(i, 0) > 0 ? 1 : 0);
    }
    for (std::size_t j = 0; j < d; ++j) data.column_names.push_back("f" + std::to_string(j));
    data.validate();
    return data;
}

bool criterion11(const std::string& scratch) {
    ExperimentConfig defaults;
    bool sweep_points = true;
    for (double tau : {10.0, 20.0, 30.0, 40.0, 100.0})
        sweep_points = sweep_points && std::find(defaults.tau_list.begin(), defaults.tau_list.end(),
                                                 tau) != defaults.tau_list.end();

    ExperimentConfig cfg;
    cfg.tau_list = {0.5};
    cfg.dt_ns = 0.1;
    cfg.n_splits = 10;
    cfg.n_repeats = 5;
    cfg.models = {ModelKind::svm};
    cfg.grids.svm_c = {1.0};
    cfg.mi_threshold = 0.0;
    cfg.encoding.corr_threshold = 0.25;
    const TabularDataset data = signed_feature_dataset(80, 4, 31);
    const SweepResult sweep = run_experiment(data, cfg, scratch + "/protocol");

    std::size_t raw_rows = 0, mapped_rows = 0, skipped = 0;
    for (const auto& row : sweep.rows) {
        if (row.skipped) ++skipped;
        else if (row.repr == Representation::raw) ++raw_rows;
        else ++mapped_rows;
    }
    bool summary_ok = false;
    for (const auto& s : sweep.summary)
        if (s.repr == Representation::aqfm && s.metric == "accuracy_balanced")
            summary_ok = s.n == 50 && s.iqr == s.q3 - s.q1 && s.median >= s.q1 && s.median <= s.q3;

    return report(11, "10x5 protocol yields exactly 50 scores per cell with median and IQR",
                  sweep_points && raw_rows == 50 && mapped_rows == 50 && skipped == 0 && summary_ok,
                  "raw " + std::to_string(raw_rows) + ", mapped " + std::to_string(mapped_rows) +
                      ", skipped " + std::to_string(skipped) +
                      ", default sweep has {10,20,30,40,100}: " + (sweep_points ? "yes" : "no"));
}

// --- criteria 12 + 13: the planted end-to-end sweep and its determinism ---

double summary_median(const SweepResult& sweep, Representation repr, double tau,
                      const std::string& metric) {
    for (const auto& s : sweep.summary)
        if (s.model == ModelKind::svm && s.repr == repr && s.tau_ns == tau && s.metric == metric)
            return s.median;
    throw std::runtime_error("acceptance: summary row missing for tau " + std::to_string(tau));
}

ExperimentConfig planted_config() {
    ExperimentConfig cfg;
    cfg.tau_list = {0.001, 20.0};
    cfg.dt_ns = 0.05;
    // Linear-kernel SVM only: its decision function scales with the feature
    // amplitudes, so near-zero sudden-limit features genuinely score ~0.5.
    // Tree ensembles are invariant under monotone feature rescaling and
    // would read signal straight through the vanishing amplitudes, which is
    // exactly what this criterion must distinguish from.
    cfg.models = {ModelKind::svm};
    cfg.encoding.coupling_scale = 1.5;
    cfg.encoding.corr_threshold = 0.15;
    cfg.n_splits = 10;
    cfg.n_repeats = 1;
    return cfg;
}

bool criterion12(const std::string& scratch, std::string& folds_a) {
    const auto t0 = steady::now();
    const PlantedDataset planted = make_planted_dataset(200, 12, 424242);
    const ExperimentConfig cfg = planted_config();
    const SweepResult sweep = run_experiment(planted.data, cfg, scratch + "/sweep_a");
    const double secs = seconds_since(t0);
    folds_a = scratch + "/sweep_a/folds.csv";

    const double sudden = summary_median(sweep, Representation::aqfm, 0.001, "accuracy_balanced");
    const double quench = summary_median(sweep, Representation::aqfm, 20.0, "accuracy_balanced");
    return report(12, "planted 200x12 sweep: no signal at tau=0.001, recovered at tau=20",
                  sudden <= 0.55 && quench - sudden >= 0.1 && secs < 300.0,
                  "median bal_acc " + fmt(sudden) + " -> " + fmt(quench) + " (needs <=0.55 and +0.1), " +
                      fmt(secs, 3) + " s limit 300");
}

bool criterion13(const std::string& scratch, const std::string& folds_a) {
    const PlantedDataset planted = make_planted_dataset(200, 12, 424242);
    const ExperimentConfig cfg = planted_config();
    run_experiment(planted.data, cfg, scratch + "/sweep_b");
    const std::string a = testutil::read_text(folds_a);
    const std::string b = testutil::read_text(scratch + "/sweep_b/folds.csv");
    return report(13, "rerunning the planted sweep reproduces folds.csv byte for byte",
                  !a.empty() && a == b,
                  std::to_string(a.size()) + " bytes vs " + std::to_string(b.size()));
}

// --- criterion 14: the no-leakage audit ---

bool criterion14() {
    const TabularDataset data = signed_feature_dataset(60, 5, 77);
    const SplitPlan plan = stratified_splits(data.labels, 5, 1, 7);
    ExperimentConfig cfg;
    cfg.mi_threshold = 0.0;
    cfg.encoding.corr_threshold = 0.2;

    const FoldArtifacts base = fit_fold_artifacts(data, plan.folds[0].train, cfg);

    TabularDataset tampered = data;
    for (std::size_t row : plan.folds[0].test) {
        for (std::size_t j = 0; j < data.n_cols(); ++j) tampered.values(row, j) += 321.0;
        tampered.labels[row] = 1 - tampered.labels[row];
    }
    const FoldArtifacts same = fit_fold_artifacts(tampered, plan.folds[0].train, cfg);

    bool identical = same.medians == base.medians && same.scaler.means == base.scaler.means &&
                     same.scaler.std_devs == base.scaler.std_devs &&
                     same.selection.selected_columns == base.selection.selected_columns &&
                     same.selection.mi_scores == base.selection.mi_scores &&
                     same.graph.n == base.graph.n &&
                     same.graph.edges.size() == base.graph.edges.size();
    if (identical)
        for (std::size_t e = 0; e < base.graph.edges.size(); ++e)
            identical = identical && same.graph.edges[e].i == base.graph.edges[e].i &&
                        same.graph.edges[e].j == base.graph.edges[e].j &&
                        same.graph.edges[e].weight == base.graph.edges[e].weight;

    return report(14, "perturbing test rows leaves training-fit artifacts bitwise unchanged",
                  identical, identical ? "all artifacts identical" : "artifacts diverged");
}

} // namespace

int main() {
    // criteria 12/13 must recompute their features, not share a warm cache
    unsetenv("QUENCHMAP_CACHE_DIR");
    testutil::TempDir scratch;

    bool all = true;
    all &= criterion1();
    all &= criterion2();
    all &= criterion3();
    all &= criterion4();
    all &= criterion5();
    all &= criterion6();
    all &= criterion7();
    all &= criterion8();
    all &= criterion9();
    all &= criterion10();
    all &= criterion11(scratch.path.string());
    std::string folds_a;
    all &= criterion12(scratch.path.string(), folds_a);
    all &= criterion13(scratch.path.string(), folds_a);
    all &= criterion14();

    std::cout << (all ? "\nacceptance: all 14 criteria pass\n"
                      : "\nacceptance: FAILED criteria above\n");
    return all ? 0 : 1;
}
