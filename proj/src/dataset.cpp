#include "quenchmap/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

#include "quenchmap/csv_io.hpp"
#include "quenchmap/rng.hpp"

namespace quenchmap {

bool TabularDataset::has_missing() const {
    for (auto m : missing)
        if (m) return true;
    return false;
}

void TabularDataset::validate() const {
    if (missing.size() != values.rows * values.cols)
        throw std::runtime_error("dataset: mask shape does not match values");
    if (labels.size() != values.rows) throw std::runtime_error("dataset: label count != row count");
    if (column_names.size() != values.cols)
        throw std::runtime_error("dataset: column name count != column count");
    std::set<std::string> names(column_names.begin(), column_names.end());
    if (names.size() != column_names.size())
        throw std::runtime_error("dataset: duplicate column names");
    bool seen0 = false, seen1 = false;
    for (int y : labels) {
        if (y == 0) seen0 = true;
        else if (y == 1) seen1 = true;
        else throw std::runtime_error("dataset: label outside {0,1}");
    }
    if (!seen0 || !seen1) throw std::runtime_error("dataset: need both classes present");
}

TabularDataset TabularDataset::select_rows(std::span<const std::size_t> idx) const {
    TabularDataset out;
    out.values = values.select_rows(idx);
    out.column_names = column_names;
    out.missing.resize(idx.size() * values.cols);
    out.labels.resize(idx.size());
    for (std::size_t k = 0; k < idx.size(); ++k) {
        if (idx[k] >= values.rows) throw std::out_of_range("dataset: row index out of range");
        out.labels[k] = labels[idx[k]];
        for (std::size_t j = 0; j < values.cols; ++j)
            out.missing[k * values.cols + j] = missing[idx[k] * values.cols + j];
    }
    return out;
}

TabularDataset TabularDataset::select_cols(std::span<const std::size_t> idx) const {
    TabularDataset out;
    out.values = values.select_cols(idx);
    out.labels = labels;
    out.missing.resize(values.rows * idx.size());
    out.column_names.resize(idx.size());
    for (std::size_t k = 0; k < idx.size(); ++k) {
        if (idx[k] >= values.cols) throw std::out_of_range("dataset: column index out of range");
        out.column_names[k] = column_names[idx[k]];
    }
    for (std::size_t i = 0; i < values.rows; ++i)
        for (std::size_t k = 0; k < idx.size(); ++k)
            out.missing[i * idx.size() + k] = missing[i * values.cols + idx[k]];
    return out;
}

static bool is_missing_token(const std::string& s) {
    std::string t;
    for (char c : s)
        if (!std::isspace(static_cast<unsigned char>(c))) t += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return t.empty() || t == "na" || t == "nan";
}

TabularDataset load_csv_dataset(const std::string& path, const std::string& label_column) {
    CsvTable table = read_csv(path);

    std::size_t label_idx = table.header.size();
    for (std::size_t j = 0; j < table.header.size(); ++j)
        if (table.header[j] == label_column) label_idx = j;
    if (label_idx == table.header.size())
        throw std::runtime_error("dataset: no column named '" + label_column + "' in " + path);
    if (table.rows.empty()) throw std::runtime_error("dataset: " + path + " has no data rows");

    const std::size_t n = table.rows.size();
    const std::size_t d = table.header.size() - 1;

    TabularDataset data;
    data.values = Matrix(n, d);
    data.missing.assign(n * d, 0);
    data.labels.resize(n);
    for (std::size_t j = 0; j < table.header.size(); ++j)
        if (j != label_idx) data.column_names.push_back(table.header[j]);

    // Two distinct raw labels; the lexicographically larger one becomes 1.
    std::set<std::string> raw_labels;
    for (const auto& row : table.rows) raw_labels.insert(row[label_idx]);
    if (raw_labels.size() != 2)
        throw std::runtime_error("dataset: label column holds " + std::to_string(raw_labels.size()) +
                                 " distinct values, need exactly 2");
    const std::string positive = *raw_labels.rbegin();

    for (std::size_t i = 0; i < n; ++i) {
        data.labels[i] = table.rows[i][label_idx] == positive ? 1 : 0;
        std::size_t jj = 0;
        for (std::size_t j = 0; j < table.header.size(); ++j) {
            if (j == label_idx) continue;
            double v = 0.0;
            if (is_missing_token(table.rows[i][j]) || !parse_double(table.rows[i][j], v)) {
                data.missing[i * d + jj] = 1;
                v = 0.0;
            }
            data.values(i, jj) = v;
            ++jj;
        }
    }

    for (std::size_t j = 0; j < d; ++j) {
        bool any_present = false;
        for (std::size_t i = 0; i < n; ++i)
            if (!data.missing[i * d + j]) any_present = true;
        if (!any_present)
            throw std::runtime_error("dataset: column '" + data.column_names[j] + "' is entirely missing");
    }

    data.validate();
    return data;
}

static double median_sorted(std::vector<double>& v) {
    std::sort(v.begin(), v.end());
    std::size_t m = v.size() / 2;
    return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

std::pair<TabularDataset, std::vector<double>> impute_median(const TabularDataset& data) {
    std::vector<double> medians(data.n_cols());
    for (std::size_t j = 0; j < data.n_cols(); ++j) {
        std::vector<double> present;
        for (std::size_t i = 0; i < data.n_rows(); ++i)
            if (!data.missing_at(i, j)) present.push_back(data.values(i, j));
        if (present.empty())
            throw std::runtime_error("impute: column '" + data.column_names[j] + "' is entirely missing");
        medians[j] = median_sorted(present);
    }
    return {impute_with(data, medians), medians};
}

TabularDataset impute_with(const TabularDataset& data, const std::vector<double>& medians) {
    if (medians.size() != data.n_cols()) throw std::runtime_error("impute: median count != column count");
    TabularDataset out = data;
    for (std::size_t i = 0; i < out.n_rows(); ++i)
        for (std::size_t j = 0; j < out.n_cols(); ++j)
            if (out.missing_at(i, j)) out.values(i, j) = medians[j];
    std::fill(out.missing.begin(), out.missing.end(), 0);
    return out;
}

static constexpr double kConstantStd = 1e-12;

std::pair<TabularDataset, Standardization> standardize_fit(const TabularDataset& data) {
    if (data.has_missing()) throw std::runtime_error("standardize: impute first");
    const std::size_t n = data.n_rows(), d = data.n_cols();
    if (n == 0) throw std::runtime_error("standardize: empty dataset");
    Standardization stats;
    stats.means.resize(d);
    stats.std_devs.resize(d);
    for (std::size_t j = 0; j < d; ++j) {
        double mean = 0.0;
        for (std::size_t i = 0; i < n; ++i) mean += data.values(i, j);
        mean /= static_cast<double>(n);
        double var = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double c = data.values(i, j) - mean;
            var += c * c;
        }
        double std_dev = std::sqrt(var / static_cast<double>(n));
        stats.means[j] = mean;
        stats.std_devs[j] = std_dev < kConstantStd ? 0.0 : std_dev;
    }
    return {standardize_apply(data, stats), stats};
}

TabularDataset standardize_apply(const TabularDataset& data, const Standardization& stats) {
    if (data.has_missing()) throw std::runtime_error("standardize: impute first");
    if (stats.means.size() != data.n_cols() || stats.std_devs.size() != data.n_cols())
        throw std::runtime_error("standardize: stats shape mismatch");
    TabularDataset out = data;
    for (std::size_t j = 0; j < out.n_cols(); ++j) {
        double mean = stats.means[j], s = stats.std_devs[j];
        for (std::size_t i = 0; i < out.n_rows(); ++i)
            out.values(i, j) = s == 0.0 ? 0.0 : (out.values(i, j) - mean) / s;
    }
    return out;
}

/// Equal-frequency bin index per element: ranks split into n_bins blocks,
/// with tied values forced into the run's starting bin so the binning (and
/// hence the MI) only depends on the ordering of the feature.
static std::vector<int> rank_bins(std::span<const double> feature, int n_bins) {
    const std::size_t n = feature.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return feature[a] < feature[b]; });
    std::vector<int> bins(n);
    std::size_t run_start = 0;
    while (run_start < n) {
        std::size_t run_end = run_start + 1;
        while (run_end < n && feature[order[run_end]] == feature[order[run_start]]) ++run_end;
        int b = static_cast<int>(run_start * static_cast<std::size_t>(n_bins) / n);
        for (std::size_t k = run_start; k < run_end; ++k) bins[order[k]] = b;
        run_start = run_end;
    }
    return bins;
}

double mutual_information(std::span<const double> feature, std::span<const int> labels, int n_bins) {
    if (feature.size() != labels.size()) throw std::runtime_error("mi: length mismatch");
    const std::size_t n = feature.size();
    if (n < 2) throw std::runtime_error("mi: need at least 2 samples");
    if (n_bins < 1) throw std::runtime_error("mi: n_bins must be positive");

    std::vector<int> bins = rank_bins(feature, n_bins);

    // labels may be any integers; map the distinct values to dense indices
    std::vector<int> label_values(labels.begin(), labels.end());
    std::sort(label_values.begin(), label_values.end());
    label_values.erase(std::unique(label_values.begin(), label_values.end()), label_values.end());
    auto label_index = [&](int y) {
        return static_cast<std::size_t>(std::lower_bound(label_values.begin(), label_values.end(), y) -
                                        label_values.begin());
    };

    const std::size_t n_y = label_values.size();
    std::vector<double> joint(static_cast<std::size_t>(n_bins) * n_y, 0.0);
    std::vector<double> p_b(n_bins, 0.0), p_y(n_y, 0.0);
    const double w = 1.0 / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t b = static_cast<std::size_t>(bins[i]);
        std::size_t y = label_index(labels[i]);
        joint[b * n_y + y] += w;
        p_b[b] += w;
        p_y[y] += w;
    }

    double mi = 0.0;
    for (int b = 0; b < n_bins; ++b)
        for (std::size_t y = 0; y < n_y; ++y) {
            double pxy = joint[static_cast<std::size_t>(b) * n_y + y];
            if (pxy > 0.0) mi += pxy * std::log(pxy / (p_b[static_cast<std::size_t>(b)] * p_y[y]));
        }
    return mi < 0.0 ? 0.0 : mi;
}

std::pair<TabularDataset, SelectionResult> select_features(const TabularDataset& data,
                                                           std::optional<std::size_t> top_k,
                                                           double mi_threshold, int n_bins) {
    if (data.has_missing()) throw std::runtime_error("select_features: impute first");
    const std::size_t d = data.n_cols();

    SelectionResult result;
    result.mi_scores.resize(d);
    std::vector<char> constant(d, 0);
    std::vector<double> column(data.n_rows());
    for (std::size_t j = 0; j < d; ++j) {
        for (std::size_t i = 0; i < data.n_rows(); ++i) column[i] = data.values(i, j);
        bool all_equal = std::all_of(column.begin(), column.end(),
                                     [&](double v) { return v == column[0]; });
        constant[j] = all_equal ? 1 : 0;
        result.mi_scores[j] = mutual_information(column, data.labels, n_bins);
    }

    std::vector<std::size_t> ranked;
    for (std::size_t j = 0; j < d; ++j)
        if (!constant[j] && result.mi_scores[j] >= mi_threshold) ranked.push_back(j);
    std::stable_sort(ranked.begin(), ranked.end(), [&](std::size_t a, std::size_t b) {
        if (result.mi_scores[a] != result.mi_scores[b]) return result.mi_scores[a] > result.mi_scores[b];
        return a < b;
    });
    if (top_k && ranked.size() > *top_k) ranked.resize(*top_k);
    if (ranked.empty()) throw std::runtime_error("select_features: no columns survive selection");

    result.selected_columns = ranked;
    return {data.select_cols(ranked), result};
}

SplitPlan stratified_splits(const std::vector<int>& labels, int n_splits, int n_repeats,
                            std::uint64_t seed) {
    if (n_splits < 2) throw std::runtime_error("splits: n_splits must be >= 2");
    if (n_repeats < 1) throw std::runtime_error("splits: n_repeats must be >= 1");

    std::vector<int> classes(labels);
    std::sort(classes.begin(), classes.end());
    classes.erase(std::unique(classes.begin(), classes.end()), classes.end());
    std::vector<std::vector<std::size_t>> by_class(classes.size());
    for (std::size_t i = 0; i < labels.size(); ++i) {
        std::size_t c = static_cast<std::size_t>(
            std::lower_bound(classes.begin(), classes.end(), labels[i]) - classes.begin());
        by_class[c].push_back(i);
    }
    for (std::size_t c = 0; c < by_class.size(); ++c)
        if (by_class[c].size() < static_cast<std::size_t>(n_splits))
            throw std::runtime_error("splits: class " + std::to_string(classes[c]) + " has " +
                                     std::to_string(by_class[c].size()) + " rows, fewer than n_splits");

    SplitPlan plan;
    plan.n_splits = n_splits;
    plan.n_repeats = n_repeats;
    plan.seed = seed;
    plan.folds.reserve(static_cast<std::size_t>(n_splits) * static_cast<std::size_t>(n_repeats));

    for (int r = 0; r < n_repeats; ++r) {
        Rng rng(seed + static_cast<std::uint64_t>(r));
        std::vector<std::vector<std::size_t>> test_sets(n_splits);
        for (auto rows : by_class) { // copy, then shuffle per repeat
            rng.shuffle(rows);
            for (std::size_t k = 0; k < rows.size(); ++k)
                test_sets[k % static_cast<std::size_t>(n_splits)].push_back(rows[k]);
        }
        for (int f = 0; f < n_splits; ++f) {
            SplitPlan::Fold fold;
            fold.test = test_sets[static_cast<std::size_t>(f)];
            std::sort(fold.test.begin(), fold.test.end());
            std::vector<char> in_test(labels.size(), 0);
            for (auto i : fold.test) in_test[i] = 1;
            for (std::size_t i = 0; i < labels.size(); ++i)
                if (!in_test[i]) fold.train.push_back(i);
            plan.folds.push_back(std::move(fold));
        }
    }
    return plan;
}

static void write_vector(std::ostream& out, const std::string& key, std::span<const double> v) {
    out << key << " =";
    for (double x : v) out << ' ' << format_double(x);
    out << '\n';
}

void save_report(const std::string& path, const PreprocessReport& report) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("report: cannot write " + path);
    write_vector(out, "medians", report.medians);
    write_vector(out, "means", report.means);
    write_vector(out, "std_devs", report.std_devs);
    out << "selected_columns =";
    for (auto j : report.selected_columns) out << ' ' << j;
    out << '\n';
    write_vector(out, "mi_scores", report.mi_scores);
}

PreprocessReport load_report(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("report: cannot open " + path);
    PreprocessReport report;
    std::string line;
    while (std::getline(in, line)) {
        std::istringstream ss(line);
        std::string key, eq;
        ss >> key >> eq;
        if (eq != "=") throw std::runtime_error("report: malformed line: " + line);
        if (key == "selected_columns") {
            std::size_t j;
            while (ss >> j) report.selected_columns.push_back(j);
            continue;
        }
        std::vector<double>* target = key == "medians"  ? &report.medians
                                      : key == "means"  ? &report.means
                                      : key == "std_devs" ? &report.std_devs
                                      : key == "mi_scores" ? &report.mi_scores
                                                           : nullptr;
        if (!target) throw std::runtime_error("report: unknown key: " + key);
        double v;
        while (ss >> v) target->push_back(v);
    }
    return report;
}

} // namespace quenchmap
