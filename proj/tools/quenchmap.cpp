// Command-line front end for the quench feature-map pipeline. Subcommands
// mirror the pipeline stages: preprocess -> encode -> map -> train work on
// the full dataset for inspection, evaluate/sweep run the cross-validated
// protocol, and oracle cross-checks the simulator against independent
// reference implementations.

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "CLI11.hpp"

#include "quenchmap/config.hpp"
#include "quenchmap/csv_io.hpp"
#include "quenchmap/dataset.hpp"
#include "quenchmap/encoding.hpp"
#include "quenchmap/evaluation.hpp"
#include "quenchmap/features.hpp"
#include "quenchmap/gbt.hpp"
#include "quenchmap/gram.hpp"
#include "quenchmap/metrics.hpp"
#include "quenchmap/oracle.hpp"
#include "quenchmap/svm.hpp"

namespace fs = std::filesystem;
using namespace quenchmap;

namespace {

/// Bad flags or an unusable config: reported on stderr with exit code 1,
/// unlike runtime failures which exit 2.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Overrides {
    std::string config_path;
    std::string out_dir = "results";
    std::optional<double> tau_ns;
    std::optional<double> dt_ns;
    std::optional<double> corr_threshold;
    std::optional<int> shots;
    std::optional<int> top_k;
    std::optional<int> max_degree;
    std::optional<int> jobs;
    std::optional<std::uint64_t> seed;
};

void add_common_options(CLI::App* cmd, Overrides& o, bool config_required) {
    auto* copt = cmd->add_option("--config", o.config_path, "experiment config file (key = value)");
    if (config_required) copt->required();
    cmd->add_option("--tau-ns", o.tau_ns, "single anneal duration in ns (replaces tau_list)");
    cmd->add_option("--dt-ns", o.dt_ns, "Trotter step size in ns");
    cmd->add_option("--shots", o.shots, "bitstring shots per sample (0 = exact expectations)");
    cmd->add_option("--seed", o.seed, "base seed for shot noise and feature-map rows");
    cmd->add_option("--top-k", o.top_k, "keep only the k best features by mutual information (0 = no cap)");
    cmd->add_option("--corr-threshold", o.corr_threshold, "minimum |Pearson rho| that becomes a coupling");
    cmd->add_option("--max-degree", o.max_degree, "coupling edges kept per node (0 = unlimited)");
    cmd->add_option("--jobs", o.jobs, "parallel fold workers");
    cmd->add_option("--out", o.out_dir, "output directory (default: results)");
}

ExperimentConfig effective_config(const Overrides& o) {
    ExperimentConfig cfg;
    try {
        cfg = load_config(o.config_path);
        if (o.tau_ns) {
            if (*o.tau_ns <= 0.0) throw std::runtime_error("--tau-ns must be positive");
            cfg.tau_list = {*o.tau_ns};
        }
        if (o.dt_ns) {
            if (*o.dt_ns <= 0.0) throw std::runtime_error("--dt-ns must be positive");
            cfg.dt_ns = *o.dt_ns;
        }
        if (o.shots) {
            if (*o.shots < 0) throw std::runtime_error("--shots must be >= 0");
            cfg.shots = *o.shots == 0 ? std::nullopt : o.shots;
        }
        if (o.seed) cfg.seed = *o.seed;
        if (o.top_k) {
            if (*o.top_k < 0) throw std::runtime_error("--top-k must be >= 0");
            if (*o.top_k == 0)
                cfg.top_k.reset();
            else
                cfg.top_k = static_cast<std::size_t>(*o.top_k);
        }
        if (o.corr_threshold) {
            if (*o.corr_threshold < 0.0) throw std::runtime_error("--corr-threshold must be >= 0");
            cfg.encoding.corr_threshold = *o.corr_threshold;
        }
        if (o.max_degree) {
            if (*o.max_degree < 0) throw std::runtime_error("--max-degree must be >= 0");
            if (*o.max_degree == 0)
                cfg.encoding.max_degree.reset();
            else
                cfg.encoding.max_degree = *o.max_degree;
        }
        if (o.jobs) {
            if (*o.jobs < 1) throw std::runtime_error("--jobs must be >= 1");
            cfg.jobs = *o.jobs;
        }
        if (cfg.dataset_path.empty())
            throw std::runtime_error("config must name a dataset (dataset = <path>)");
    } catch (const std::exception& e) {
        throw UsageError(e.what());
    }
    std::cout << "# effective configuration\n";
    write_config(cfg, std::cout);
    std::cout << "\n";
    return cfg;
}

/// The full-dataset fit shared by the stage subcommands. The evaluate/sweep
/// protocol refits all of this inside each training fold instead.
struct PipelineFit {
    TabularDataset selected;     // imputed, standardized, MI-selected columns
    PreprocessReport report;
    CouplingGraph graph;
};

PipelineFit run_pipeline(const ExperimentConfig& cfg) {
    const TabularDataset data = load_csv_dataset(cfg.dataset_path, cfg.label_column);
    auto [imputed, medians] = impute_median(data);
    auto [standardized, scaler] = standardize_fit(imputed);
    auto [selected, selection] =
        select_features(standardized, cfg.top_k, cfg.mi_threshold, cfg.mi_bins);

    PipelineFit fit;
    fit.selected = std::move(selected);
    fit.report = {medians, scaler.means, scaler.std_devs, selection.selected_columns,
                  selection.mi_scores};
    fit.graph = fit_couplings(fit.selected.values, cfg.encoding);
    return fit;
}

double lead_tau(const ExperimentConfig& cfg) {
    if (cfg.tau_list.empty()) throw UsageError("tau_list is empty");
    return cfg.tau_list.front();
}

FeatureMapOptions map_options(const ExperimentConfig& cfg, double tau_ns) {
    FeatureMapOptions opts;
    opts.quench.schedule = cfg.schedule;
    opts.quench.schedule.tau_ns = tau_ns;
    opts.quench.dt_ns = cfg.dt_ns;
    opts.include_zz = cfg.include_zz;
    opts.h_max = cfg.encoding.h_max;
    opts.shots = cfg.shots;
    opts.seed = cfg.seed;
    if (const char* env = std::getenv("QUENCHMAP_CACHE_DIR")) opts.cache_dir = env;
    return opts;
}

int run_preprocess(const Overrides& o) {
    const ExperimentConfig cfg = effective_config(o);
    const PipelineFit fit = run_pipeline(cfg);
    fs::create_directories(o.out_dir);
    save_report((fs::path(o.out_dir) / "preprocess_report.txt").string(), fit.report);

    std::vector<std::string> header = {cfg.label_column};
    header.insert(header.end(), fit.selected.column_names.begin(), fit.selected.column_names.end());
    std::vector<std::vector<std::string>> rows;
    for (std::size_t i = 0; i < fit.selected.n_rows(); ++i) {
        std::vector<std::string> row = {std::to_string(fit.selected.labels[i])};
        for (std::size_t j = 0; j < fit.selected.n_cols(); ++j)
            row.push_back(format_double(fit.selected.values(i, j)));
        rows.push_back(std::move(row));
    }
    write_csv((fs::path(o.out_dir) / "preprocessed.csv").string(), header, rows);

    std::cout << "kept " << fit.selected.n_cols() << " of " << fit.report.mi_scores.size()
              << " features; wrote " << o.out_dir << "/preprocessed.csv and preprocess_report.txt\n";
    return 0;
}

int run_encode(const Overrides& o) {
    const ExperimentConfig cfg = effective_config(o);
    const PipelineFit fit = run_pipeline(cfg);
    fs::create_directories(o.out_dir);
    save_couplings((fs::path(o.out_dir) / "couplings.txt").string(), fit.graph);
    std::cout << "fit " << fit.graph.edges.size() << " couplings over " << fit.graph.n
              << " qubits; wrote " << o.out_dir << "/couplings.txt\n";
    return 0;
}

int run_map(const Overrides& o) {
    const ExperimentConfig cfg = effective_config(o);
    const PipelineFit fit = run_pipeline(cfg);
    const double tau = lead_tau(cfg);
    const MappedDataset mapped =
        map_dataset(fit.selected.values, fit.selected.labels, fit.graph, map_options(cfg, tau));
    fs::create_directories(o.out_dir);
    const std::string path = (fs::path(o.out_dir) / "mapped.csv").string();
    save_mapped_csv(mapped, path);
    std::cout << "mapped " << mapped.features.rows << " samples to " << mapped.features.cols
              << " quench features at tau = " << tau << " ns; wrote " << path
              << " (+ .provenance)\n";
    return 0;
}

std::vector<int> to_pm_labels(const std::vector<int>& labels01) {
    std::vector<int> out(labels01.size());
    for (std::size_t i = 0; i < labels01.size(); ++i) out[i] = labels01[i] > 0 ? 1 : -1;
    return out;
}

int run_train(const Overrides& o) {
    const ExperimentConfig cfg = effective_config(o);
    const PipelineFit fit = run_pipeline(cfg);
    const double tau = lead_tau(cfg);

    const bool want_fidelity =
        std::find(cfg.models.begin(), cfg.models.end(), ModelKind::svm_fidelity) != cfg.models.end();
    std::vector<StateVector> states;
    const MappedDataset mapped =
        map_dataset(fit.selected.values, fit.selected.labels, fit.graph, map_options(cfg, tau),
                    want_fidelity ? &states : nullptr);
    fs::create_directories(o.out_dir);
    save_mapped_csv(mapped, (fs::path(o.out_dir) / "mapped.csv").string());

    const std::vector<int> y = to_pm_labels(fit.selected.labels);
    std::cout << "training on all " << y.size() << " rows at tau = " << tau
              << " ns with the first grid point of each model\n";
    std::cout << std::left << std::setw(14) << "model" << std::setw(6) << "repr" << std::setw(10)
              << "bal_acc" << std::setw(10) << "auc" << "file\n";

    auto report_line = [&](ModelKind kind, Representation repr, const MetricsReport& m,
                           const std::string& file) {
        std::cout << std::left << std::setw(14) << model_name(kind) << std::setw(6)
                  << representation_name(repr) << std::setw(10) << std::setprecision(4) << m.accuracy
                  << std::setw(10) << m.auc << file << "\n";
    };

    for (ModelKind kind : cfg.models) {
        for (Representation repr : {Representation::raw, Representation::aqfm}) {
            if (kind == ModelKind::svm_fidelity && repr == Representation::raw) continue;
            const Matrix& feats =
                repr == Representation::raw ? fit.selected.values : mapped.features;
            const std::string file = (fs::path(o.out_dir) /
                                      (model_name(kind) + "_" + representation_name(repr) + ".txt"))
                                         .string();
            if (kind == ModelKind::gbt) {
                GbtOptions gopt;
                gopt.n_trees = cfg.grids.gbt_trees.at(0);
                gopt.max_depth = cfg.grids.gbt_depth.at(0);
                gopt.learning_rate = cfg.grids.gbt_rate.at(0);
                gopt.seed = cfg.seed;
                const GbtModel model = gbt_train(feats, fit.selected.labels, gopt);
                save_gbt(model, file);
                const std::vector<int> pred = gbt_predict(model, feats);
                const std::vector<double> proba = gbt_predict_proba(model, feats);
                report_line(kind, repr, compute_metrics(y, pred, proba), file);
            } else {
                const Matrix k = kind == ModelKind::svm_fidelity
                                     ? gram_fidelity(states, states)
                                     : gram_linear(feats, feats);
                SvmOptions sopt;
                sopt.c = cfg.grids.svm_c.at(0);
                const SvmModel model = svm_train(k, fit.selected.labels, sopt);
                save_svm(model, file);
                const SvmPrediction pred = svm_predict(model, k);
                report_line(kind, repr, compute_metrics(y, pred.labels, pred.decision), file);
            }
        }
    }
    return 0;
}

void print_sweep_summary(const SweepResult& result, const std::string& out_dir) {
    struct Cell {
        double bal_acc = 0.0, iqr = 0.0, auc = 0.0;
        std::size_t n = 0;
        bool has_auc = false;
    };
    std::map<std::tuple<double, std::string, std::string>, Cell> cells;
    for (const auto& row : result.summary) {
        auto& cell = cells[{row.tau_ns, model_name(row.model), representation_name(row.repr)}];
        if (row.metric == "accuracy_balanced") {
            cell.bal_acc = row.median;
            cell.iqr = row.iqr;
            cell.n = row.n;
        } else if (row.metric == "auc") {
            cell.auc = row.median;
            cell.has_auc = true;
        }
    }
    std::cout << std::left << std::setw(10) << "tau_ns" << std::setw(14) << "model" << std::setw(6)
              << "repr" << std::setw(8) << "scores" << std::setw(18) << "bal_acc med (IQR)"
              << "auc med\n";
    for (const auto& [key, cell] : cells) {
        std::ostringstream acc;
        acc << std::setprecision(4) << cell.bal_acc << " (" << std::setprecision(3) << cell.iqr
            << ")";
        std::cout << std::left << std::setw(10) << std::get<0>(key) << std::setw(14)
                  << std::get<1>(key) << std::setw(6) << std::get<2>(key) << std::setw(8) << cell.n
                  << std::setw(18) << acc.str();
        if (cell.has_auc)
            std::cout << std::setprecision(4) << cell.auc;
        else
            std::cout << "-";
        std::cout << "\n";
    }
    std::cout << "results in " << out_dir << "/ (folds.csv, summary.csv, winners.csv)\n";
}

int run_evaluate(const Overrides& o, bool full_sweep) {
    ExperimentConfig cfg = effective_config(o);
    if (!full_sweep) cfg.tau_list = {lead_tau(cfg)};
    const TabularDataset data = load_csv_dataset(cfg.dataset_path, cfg.label_column);
    const SweepResult result = run_experiment(data, cfg, o.out_dir);
    print_sweep_summary(result, o.out_dir);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"quenchmap: quantum feature maps for tabular data via quenched Ising dynamics"};
    app.require_subcommand(1);
    app.failure_message(CLI::FailureMessage::help);

    Overrides o;
    int oracle_qubits = 4;
    std::uint64_t oracle_seed = 42;

    auto* preprocess = app.add_subcommand(
        "preprocess", "impute, standardize and MI-select features over the whole dataset");
    add_common_options(preprocess, o, true);
    auto* encode = app.add_subcommand(
        "encode", "fit the correlation coupling graph on the preprocessed dataset");
    add_common_options(encode, o, true);
    auto* map_cmd = app.add_subcommand(
        "map", "quench every sample and write the mapped feature CSV with provenance");
    add_common_options(map_cmd, o, true);
    auto* train = app.add_subcommand(
        "train", "fit the configured models on the full dataset and save them");
    add_common_options(train, o, true);
    auto* evaluate = app.add_subcommand(
        "evaluate", "cross-validated protocol at a single anneal duration");
    add_common_options(evaluate, o, true);
    auto* sweep = app.add_subcommand(
        "sweep", "cross-validated protocol over the whole tau_list");
    add_common_options(sweep, o, true);
    auto* oracle_cmd = app.add_subcommand(
        "oracle", "cross-check the simulator against dense ODE/eigensolver references");
    oracle_cmd->add_option("--n", oracle_qubits, "qubit count for the checks (1..6)")
        ->check(CLI::Range(1, 6));
    oracle_cmd->add_option("--seed", oracle_seed, "instance seed");

    int rc = 0;
    preprocess->callback([&] { rc = run_preprocess(o); });
    encode->callback([&] { rc = run_encode(o); });
    map_cmd->callback([&] { rc = run_map(o); });
    train->callback([&] { rc = run_train(o); });
    evaluate->callback([&] { rc = run_evaluate(o, false); });
    sweep->callback([&] { rc = run_evaluate(o, true); });
    oracle_cmd->callback([&] {
        const bool ok = oracle::run_oracle_suite(oracle_qubits, oracle_seed, std::cout);
        std::cout << (ok ? "all oracle checks passed\n" : "oracle checks FAILED\n");
        rc = ok ? 0 : 2;
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return rc;
}
