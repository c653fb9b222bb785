#include "quenchmap/evaluation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "quenchmap/csv_io.hpp"
#include "quenchmap/features.hpp"
#include "quenchmap/gbt.hpp"
#include "quenchmap/gram.hpp"
#include "quenchmap/rng.hpp"
#include "quenchmap/svm.hpp"

namespace quenchmap {

FoldArtifacts fit_fold_artifacts(const TabularDataset& data,
                                 std::span<const std::size_t> train_rows,
                                 const ExperimentConfig& config) {
    const TabularDataset train = data.select_rows(train_rows);
    auto [imputed, medians] = impute_median(train);
    auto [standardized, scaler] = standardize_fit(imputed);
    auto [selected, selection] =
        select_features(standardized, config.top_k, config.mi_threshold, config.mi_bins);
    FoldArtifacts artifacts;
    artifacts.medians = std::move(medians);
    artifacts.scaler = std::move(scaler);
    artifacts.selection = std::move(selection);
    artifacts.graph = fit_couplings(selected.values, config.encoding);
    return artifacts;
}

namespace {

struct TransformedRows {
    Matrix x;
    std::vector<int> y; // -1 / +1
};

TransformedRows transform_rows(const TabularDataset& data, std::span<const std::size_t> rows,
                               const FoldArtifacts& artifacts) {
    TabularDataset subset = data.select_rows(rows);
    subset = impute_with(subset, artifacts.medians);
    subset = standardize_apply(subset, artifacts.scaler);
    subset = subset.select_cols(artifacts.selection.selected_columns);
    TransformedRows out;
    out.x = std::move(subset.values);
    out.y.resize(subset.labels.size());
    for (std::size_t i = 0; i < subset.labels.size(); ++i)
        out.y[i] = subset.labels[i] ? 1 : -1;
    return out;
}

Matrix submatrix_rows(const Matrix& m, std::span<const std::size_t> rows) {
    return m.select_rows(rows);
}

Matrix subgram(const Matrix& k, std::span<const std::size_t> rows,
               std::span<const std::size_t> cols) {
    Matrix out(rows.size(), cols.size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < cols.size(); ++j) out(i, j) = k(rows[i], cols[j]);
    return out;
}

std::vector<int> subset_labels(std::span<const int> y, std::span<const std::size_t> idx) {
    std::vector<int> out(idx.size());
    for (std::size_t k = 0; k < idx.size(); ++k) out[k] = y[idx[k]];
    return out;
}

struct InnerSplit {
    std::vector<std::size_t> fit, val;
};

/// Fixed stratified 80/20 split of the training fold (first fold of a 5-way
/// plan); nested mode evaluates the grid on all five folds instead.
std::vector<InnerSplit> make_inner_splits(const std::vector<int>& y, bool nested,
                                          std::uint64_t seed) {
    const SplitPlan plan = stratified_splits(y, 5, 1, seed);
    std::vector<InnerSplit> splits;
    for (const auto& fold : plan.folds) {
        splits.push_back({fold.train, fold.test});
        if (!nested) break;
    }
    return splits;
}

double balanced_accuracy(std::span<const int> y_true, std::span<const int> y_pred,
                         std::span<const double> scores) {
    return compute_metrics(y_true, y_pred, scores).accuracy;
}

/// Pick C on the inner splits, refit on the whole training fold, score the
/// test rows. k_train is the train-fold Gram, k_test is test rows x train rows.
struct ScoredModel {
    MetricsReport metrics;
    std::string hyperparams;
};

ScoredModel score_svm(const Matrix& k_train, const std::vector<int>& y_train,
                      const Matrix& k_test, const std::vector<int>& y_test,
                      std::span<const InnerSplit> splits, std::span<const double> c_grid) {
    double best_c = c_grid.front();
    double best_score = -std::numeric_limits<double>::infinity();
    for (double c : c_grid) {
        double mean = 0.0;
        for (const auto& split : splits) {
            SvmOptions opt;
            opt.c = c;
            const SvmModel model = svm_train(subgram(k_train, split.fit, split.fit),
                                             subset_labels(y_train, split.fit), opt);
            const SvmPrediction pred = svm_predict(model, subgram(k_train, split.val, split.fit));
            mean += balanced_accuracy(subset_labels(y_train, split.val), pred.labels, pred.decision);
        }
        mean /= static_cast<double>(splits.size());
        if (mean > best_score) {
            best_score = mean;
            best_c = c;
        }
    }

    SvmOptions opt;
    opt.c = best_c;
    const SvmModel model = svm_train(k_train, y_train, opt);
    const SvmPrediction pred = svm_predict(model, k_test);
    return {compute_metrics(y_test, pred.labels, pred.decision), "C=" + format_double(best_c)};
}

ScoredModel score_gbt(const Matrix& x_train, const std::vector<int>& y_train,
                      const Matrix& x_test, const std::vector<int>& y_test,
                      std::span<const InnerSplit> splits, const ModelGrids& grids,
                      std::uint64_t seed) {
    GbtOptions best;
    best.seed = seed;
    double best_score = -std::numeric_limits<double>::infinity();
    for (int trees : grids.gbt_trees)
        for (int depth : grids.gbt_depth)
            for (double rate : grids.gbt_rate) {
                GbtOptions opt;
                opt.n_trees = trees;
                opt.max_depth = depth;
                opt.learning_rate = rate;
                opt.seed = seed;
                double mean = 0.0;
                for (const auto& split : splits) {
                    const GbtModel model = gbt_train(submatrix_rows(x_train, split.fit),
                                                     subset_labels(y_train, split.fit), opt);
                    const Matrix x_val = submatrix_rows(x_train, split.val);
                    const auto proba = gbt_predict_proba(model, x_val);
                    const auto pred = gbt_predict(model, x_val);
                    mean += balanced_accuracy(subset_labels(y_train, split.val), pred, proba);
                }
                mean /= static_cast<double>(splits.size());
                if (mean > best_score) {
                    best_score = mean;
                    best = opt;
                }
            }

    const GbtModel model = gbt_train(x_train, y_train, best);
    const auto proba = gbt_predict_proba(model, x_test);
    const auto pred = gbt_predict(model, x_test);
    std::ostringstream hp;
    hp << "trees=" << best.n_trees << " depth=" << best.max_depth
       << " rate=" << format_double(best.learning_rate);
    return {compute_metrics(y_test, pred, proba), hp.str()};
}

} // namespace

std::vector<FoldScore> run_fold(const TabularDataset& data, const SplitPlan& plan,
                                std::size_t fold_index, double tau_ns,
                                const ExperimentConfig& config, const std::string& cache_dir) {
    const SplitPlan::Fold& fold = plan.folds.at(fold_index);
    FoldScore proto;
    proto.repeat = static_cast<int>(fold_index) / plan.n_splits;
    proto.fold = static_cast<int>(fold_index) % plan.n_splits;
    proto.tau_ns = tau_ns;

    const FoldArtifacts artifacts = fit_fold_artifacts(data, fold.train, config);
    const TransformedRows train = transform_rows(data, fold.train, artifacts);
    const TransformedRows test = transform_rows(data, fold.test, artifacts);

    const bool want_fidelity =
        std::find(config.models.begin(), config.models.end(), ModelKind::svm_fidelity) !=
        config.models.end();

    FeatureMapOptions fmo;
    fmo.quench.schedule = config.schedule;
    fmo.quench.schedule.tau_ns = tau_ns;
    fmo.quench.dt_ns = config.dt_ns;
    fmo.include_zz = config.include_zz;
    fmo.h_max = config.encoding.h_max;
    fmo.shots = config.shots;
    fmo.seed = combine_seeds(config.seed, fold_index);
    fmo.cache_dir = want_fidelity ? std::string{} : cache_dir;

    std::vector<StateVector> train_states, test_states;
    const MappedDataset mapped_train = map_dataset(train.x, train.y, artifacts.graph, fmo,
                                                   want_fidelity ? &train_states : nullptr);
    const MappedDataset mapped_test = map_dataset(test.x, test.y, artifacts.graph, fmo,
                                                  want_fidelity ? &test_states : nullptr);

    // Inner model-selection split; when a class is too small the whole cell
    // is reported as skipped rather than silently changing protocol.
    std::vector<InnerSplit> splits;
    std::string skip_reason;
    try {
        splits = make_inner_splits(train.y, config.nested_grid_search,
                                   combine_seeds(config.cv_seed, fold_index));
    } catch (const std::exception& e) {
        skip_reason = std::string("inner split impossible: ") + e.what();
    }

    // Linear Gram matrices are shared across the C grid.
    Matrix k_train_raw, k_test_raw, k_train_map, k_test_map, k_train_fid, k_test_fid;
    const bool want_svm = std::find(config.models.begin(), config.models.end(), ModelKind::svm) !=
                          config.models.end();
    if (skip_reason.empty() && want_svm) {
        k_train_raw = gram_linear(train.x, train.x);
        k_test_raw = gram_linear(test.x, train.x);
        k_train_map = gram_linear(mapped_train.features, mapped_train.features);
        k_test_map = gram_linear(mapped_test.features, mapped_train.features);
    }
    if (skip_reason.empty() && want_fidelity) {
        k_train_fid = gram_fidelity(train_states, train_states);
        k_test_fid = gram_fidelity(test_states, train_states);
    }

    std::vector<FoldScore> rows;
    for (ModelKind model : config.models) {
        for (Representation repr : {Representation::raw, Representation::aqfm}) {
            if (model == ModelKind::svm_fidelity && repr == Representation::raw)
                continue; // the fidelity kernel only exists for quench states
            FoldScore row = proto;
            row.model = model;
            row.repr = repr;
            if (!skip_reason.empty()) {
                row.skipped = true;
                row.skip_reason = skip_reason;
                rows.push_back(std::move(row));
                continue;
            }
            const bool raw = repr == Representation::raw;
            ScoredModel scored;
            switch (model) {
                case ModelKind::svm:
                    scored = score_svm(raw ? k_train_raw : k_train_map, train.y,
                                       raw ? k_test_raw : k_test_map, test.y, splits,
                                       config.grids.svm_c);
                    break;
                case ModelKind::svm_fidelity:
                    scored = score_svm(k_train_fid, train.y, k_test_fid, test.y, splits,
                                       config.grids.svm_c);
                    break;
                case ModelKind::gbt:
                    scored = score_gbt(raw ? train.x : mapped_train.features, train.y,
                                       raw ? test.x : mapped_test.features, test.y, splits,
                                       config.grids, combine_seeds(config.seed, fold_index));
                    break;
            }
            row.metrics = scored.metrics;
            row.hyperparams = scored.hyperparams;
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

Quartiles quartiles(std::span<const double> values) {
    if (values.empty()) throw std::runtime_error("quartiles: empty sample");
    std::vector<double> v(values.begin(), values.end());
    std::sort(v.begin(), v.end());
    auto at = [&](double p) {
        const double h = static_cast<double>(v.size() - 1) * p;
        const std::size_t lo = static_cast<std::size_t>(h);
        const double frac = h - static_cast<double>(lo);
        return lo + 1 < v.size() ? v[lo] + frac * (v[lo + 1] - v[lo]) : v[lo];
    };
    return {at(0.25), at(0.5), at(0.75)};
}

namespace {

constexpr const char* kMetricNames[] = {"accuracy_balanced", "accuracy_plain", "precision",
                                        "recall", "f1", "auc"};

double metric_value(const MetricsReport& m, std::size_t which) {
    switch (which) {
        case 0: return m.accuracy;
        case 1: return m.accuracy_plain;
        case 2: return m.precision;
        case 3: return m.recall;
        case 4: return m.f1;
        default: return m.auc;
    }
}

int model_order(ModelKind m) { return static_cast<int>(m); }

bool row_before(const FoldScore& a, const FoldScore& b) {
    return std::tuple(a.tau_ns, model_order(a.model), static_cast<int>(a.repr), a.repeat, a.fold) <
           std::tuple(b.tau_ns, model_order(b.model), static_cast<int>(b.repr), b.repeat, b.fold);
}

} // namespace

std::vector<SummaryRow> summarize(std::span<const FoldScore> rows) {
    std::map<std::tuple<double, int, int>, std::vector<const FoldScore*>> groups;
    for (const auto& row : rows) {
        if (row.skipped) continue;
        groups[{row.tau_ns, model_order(row.model), static_cast<int>(row.repr)}].push_back(&row);
    }

    std::vector<SummaryRow> summary;
    for (const auto& [key, members] : groups) {
        for (std::size_t which = 0; which < std::size(kMetricNames); ++which) {
            std::vector<double> values;
            for (const auto* row : members) {
                const double v = metric_value(row->metrics, which);
                if (!std::isnan(v)) values.push_back(v);
            }
            if (values.empty()) continue;
            const Quartiles q = quartiles(values);
            SummaryRow s;
            s.tau_ns = std::get<0>(key);
            s.model = static_cast<ModelKind>(std::get<1>(key));
            s.repr = static_cast<Representation>(std::get<2>(key));
            s.metric = kMetricNames[which];
            s.n = values.size();
            s.median = q.median;
            s.q1 = q.q1;
            s.q3 = q.q3;
            s.iqr = q.q3 - q.q1;
            summary.push_back(std::move(s));
        }
    }
    return summary;
}

void write_folds_csv(std::span<const FoldScore> rows, const std::string& dataset_name,
                     const std::string& path) {
    std::vector<std::vector<std::string>> out;
    for (const auto& row : rows) {
        std::vector<std::string> cells{dataset_name,
                                       model_name(row.model),
                                       representation_name(row.repr),
                                       format_double(row.tau_ns),
                                       std::to_string(row.repeat),
                                       std::to_string(row.fold)};
        if (row.skipped) {
            cells.insert(cells.end(), 6, "");
        } else {
            for (std::size_t which = 0; which < 6; ++which)
                cells.push_back(format_double(metric_value(row.metrics, which)));
        }
        out.push_back(std::move(cells));
    }
    write_csv(path,
              {"dataset", "model", "representation", "tau_ns", "repeat", "fold",
               "accuracy_balanced", "accuracy_plain", "precision", "recall", "f1", "auc"},
              out);
}

void write_summary_csv(std::span<const SummaryRow> summary, const std::string& path) {
    std::vector<std::vector<std::string>> out;
    for (const auto& s : summary)
        out.push_back({model_name(s.model), representation_name(s.repr), format_double(s.tau_ns),
                       s.metric, std::to_string(s.n), format_double(s.median), format_double(s.q1),
                       format_double(s.q3), format_double(s.iqr)});
    write_csv(path, {"model", "representation", "tau_ns", "metric", "n", "median", "q1", "q3", "iqr"},
              out);
}

namespace {

ModelKind parse_model(const std::string& name) {
    if (name == "svm") return ModelKind::svm;
    if (name == "svm_fidelity") return ModelKind::svm_fidelity;
    if (name == "gbt") return ModelKind::gbt;
    throw std::runtime_error("ledger: unknown model name: " + name);
}

std::string sanitize_reason(std::string reason) {
    for (char& c : reason)
        if (c == ',' || c == '\n' || c == '\r') c = ';';
    return reason;
}

std::string ledger_row(const FoldScore& row) {
    std::ostringstream out;
    out << model_name(row.model) << ',' << representation_name(row.repr) << ','
        << format_double(row.tau_ns) << ',' << row.repeat << ',' << row.fold;
    for (std::size_t which = 0; which < 6; ++which)
        out << ',' << (row.skipped ? "" : format_double(metric_value(row.metrics, which)));
    out << ',' << row.hyperparams << ',' << sanitize_reason(row.skip_reason);
    return out.str();
}

FoldScore parse_ledger_row(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    while (cells.size() < 13) cells.emplace_back(); // trailing empties drop in getline
    if (cells.size() != 13) throw std::runtime_error("ledger: malformed row: " + line);

    FoldScore row;
    row.model = parse_model(cells[0]);
    row.repr = cells[1] == "raw" ? Representation::raw : Representation::aqfm;
    if (!parse_double(cells[2], row.tau_ns)) throw std::runtime_error("ledger: bad tau: " + line);
    row.repeat = static_cast<int>(std::stol(cells[3]));
    row.fold = static_cast<int>(std::stol(cells[4]));
    if (cells[5].empty()) {
        row.skipped = true;
    } else {
        double v[6];
        for (std::size_t which = 0; which < 6; ++which)
            if (!parse_double(cells[5 + which], v[which]))
                throw std::runtime_error("ledger: bad metric: " + line);
        row.metrics.accuracy = v[0];
        row.metrics.accuracy_plain = v[1];
        row.metrics.precision = v[2];
        row.metrics.recall = v[3];
        row.metrics.f1 = v[4];
        row.metrics.auc = v[5];
    }
    row.hyperparams = cells[11];
    row.skip_reason = cells[12];
    return row;
}

struct Cell {
    double tau = 0.0;
    std::size_t fold_index = 0;
};

std::string cell_key(double tau, std::size_t fold_index) {
    return format_double(tau) + "#" + std::to_string(fold_index);
}

/// cells.log: a header binding the ledger to one config fingerprint, then
/// per completed cell a "cell" line, its rows, and a closing "done" line.
/// Only fully closed cells count; a crash mid-cell costs just that cell.
std::map<std::string, std::vector<FoldScore>> load_ledger(const std::string& path,
                                                          std::uint64_t fingerprint) {
    std::map<std::string, std::vector<FoldScore>> cells;
    std::ifstream in(path, std::ios::binary);
    if (!in) return cells;

    std::string line;
    char expected[64];
    std::snprintf(expected, sizeof expected, "# quenchmap cells v1 fp=%016llx",
                  static_cast<unsigned long long>(fingerprint));
    if (!std::getline(in, line) || line != expected) {
        std::cerr << "note: " << path << " belongs to a different configuration; starting fresh\n";
        return cells;
    }

    while (std::getline(in, line)) {
        std::istringstream ss(line);
        std::string tag, tau_text;
        std::size_t fold_index = 0, n_rows = 0;
        if (!(ss >> tag >> tau_text >> fold_index >> n_rows) || tag != "cell") continue;
        std::vector<FoldScore> rows;
        bool ok = true;
        for (std::size_t k = 0; k < n_rows && ok; ++k) {
            if (!std::getline(in, line)) ok = false;
            else {
                try {
                    rows.push_back(parse_ledger_row(line));
                } catch (const std::exception&) {
                    ok = false; // torn write: drop the cell, recompute it
                }
            }
        }
        if (!ok || !std::getline(in, line)) break;
        std::istringstream done(line);
        std::string done_tag, done_tau;
        std::size_t done_fold = 0;
        if (!(done >> done_tag >> done_tau >> done_fold) || done_tag != "done" ||
            done_tau != tau_text || done_fold != fold_index)
            continue;
        cells[tau_text + "#" + std::to_string(fold_index)] = std::move(rows);
    }
    return cells;
}

} // namespace

SweepResult run_experiment(const TabularDataset& data, const ExperimentConfig& config,
                           const std::string& out_dir) {
    if (config.tau_list.empty()) throw std::runtime_error("experiment: tau_list is empty");
    for (double tau : config.tau_list)
        if (tau <= 0.0) throw std::runtime_error("experiment: tau values must be positive");
    data.validate();

    std::filesystem::create_directories(out_dir);
    const std::uint64_t fingerprint = config_fingerprint(config);

    std::string cache_dir = out_dir + "/cache";
    if (const char* env = std::getenv("QUENCHMAP_CACHE_DIR"); env && *env) cache_dir = env;

    const SplitPlan plan =
        stratified_splits(data.labels, config.n_splits, config.n_repeats, config.cv_seed);

    // Resume: cells already journaled under this exact config are not redone.
    const std::string ledger_path = out_dir + "/cells.log";
    auto done_cells = load_ledger(ledger_path, fingerprint);
    const bool fresh = done_cells.empty();

    std::vector<Cell> todo;
    std::vector<FoldScore> results;
    for (double tau : config.tau_list)
        for (std::size_t f = 0; f < plan.folds.size(); ++f) {
            const auto it = done_cells.find(cell_key(tau, f));
            if (it == done_cells.end()) todo.push_back({tau, f});
            else results.insert(results.end(), it->second.begin(), it->second.end());
        }

    std::ofstream ledger(ledger_path, fresh ? std::ios::binary | std::ios::trunc
                                            : std::ios::binary | std::ios::app);
    if (!ledger) throw std::runtime_error("experiment: cannot write " + ledger_path);
    if (fresh) {
        char header[64];
        std::snprintf(header, sizeof header, "# quenchmap cells v1 fp=%016llx",
                      static_cast<unsigned long long>(fingerprint));
        ledger << header << '\n' << std::flush;
    }

    std::mutex mutex;
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;

    auto worker = [&] {
        while (true) {
            const std::size_t k = next.fetch_add(1);
            if (k >= todo.size()) return;
            const Cell cell = todo[k];
            try {
                auto rows = run_fold(data, plan, cell.fold_index, cell.tau, config, cache_dir);
                std::lock_guard<std::mutex> lock(mutex);
                ledger << "cell " << format_double(cell.tau) << ' ' << cell.fold_index << ' '
                       << rows.size() << '\n';
                for (const auto& row : rows) ledger << ledger_row(row) << '\n';
                ledger << "done " << format_double(cell.tau) << ' ' << cell.fold_index << '\n'
                       << std::flush;
                results.insert(results.end(), rows.begin(), rows.end());
            } catch (...) {
                std::lock_guard<std::mutex> lock(mutex);
                if (!failure) failure = std::current_exception();
                return;
            }
        }
    };

    const int jobs = std::max(1, config.jobs);
    if (jobs == 1 || todo.size() <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < std::min<int>(jobs, static_cast<int>(todo.size())); ++t)
            pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    if (failure) std::rethrow_exception(failure);

    std::sort(results.begin(), results.end(), row_before);

    SweepResult sweep;
    sweep.rows = std::move(results);
    sweep.summary = summarize(sweep.rows);

    std::string dataset_name = "dataset";
    if (!config.dataset_path.empty())
        dataset_name = std::filesystem::path(config.dataset_path).stem().string();

    write_folds_csv(sweep.rows, dataset_name, out_dir + "/folds.csv");
    write_summary_csv(sweep.summary, out_dir + "/summary.csv");

    // Winning hyperparameters and skip reasons, one row per scored cell.
    {
        std::vector<std::vector<std::string>> rows;
        for (const auto& row : sweep.rows)
            rows.push_back({dataset_name, model_name(row.model), representation_name(row.repr),
                            format_double(row.tau_ns), std::to_string(row.repeat),
                            std::to_string(row.fold), row.hyperparams,
                            sanitize_reason(row.skip_reason)});
        write_csv(out_dir + "/winners.csv",
                  {"dataset", "model", "representation", "tau_ns", "repeat", "fold", "hyperparams",
                   "skip_reason"},
                  rows);
    }

    std::ofstream cfg(out_dir + "/effective_config.cfg", std::ios::binary);
    if (!cfg) throw std::runtime_error("experiment: cannot write effective_config.cfg");
    write_config(config, cfg);

    return sweep;
}

} // namespace quenchmap
