#include "quenchmap/gbt.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include "quenchmap/rng.hpp"

namespace quenchmap {

double GbtTree::predict(std::span<const double> x) const {
    int node = 0;
    while (nodes[static_cast<std::size_t>(node)].feature >= 0) {
        const Node& nd = nodes[static_cast<std::size_t>(node)];
        node = x[static_cast<std::size_t>(nd.feature)] <= nd.threshold ? nd.left : nd.right;
    }
    return nodes[static_cast<std::size_t>(node)].value;
}

namespace {

double sigmoid(double v) { return 1.0 / (1.0 + std::exp(-v)); }

struct TreeBuilder {
    const Matrix& x;
    const std::vector<double>& residual; // y - p per row
    const std::vector<double>& hessian;  // p(1-p) per row
    const GbtOptions& opt;
    GbtTree tree;

    // Best squared-error split of the rows: maximize sum_L^2/n_L + sum_R^2/n_R.
    // Thresholds are midpoints between adjacent distinct feature values; ties
    // resolve to the first feature and the lowest threshold.
    struct Split {
        bool found = false;
        int feature = -1;
        double threshold = 0.0;
        double gain = 0.0;
    };

    Split best_split(std::vector<std::size_t>& rows) const {
        Split best;
        const auto n = static_cast<double>(rows.size());
        double total = 0.0;
        for (std::size_t r : rows) total += residual[r];
        const double parent = total * total / n;

        std::vector<std::size_t> order(rows);
        for (std::size_t f = 0; f < x.cols; ++f) {
            std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
                return x(a, f) < x(b, f);
            });
            double left = 0.0;
            for (std::size_t k = 0; k + 1 < order.size(); ++k) {
                left += residual[order[k]];
                const double v0 = x(order[k], f), v1 = x(order[k + 1], f);
                if (v0 == v1) continue;
                const double nl = static_cast<double>(k + 1);
                const double nr = n - nl;
                const double right = total - left;
                const double gain = left * left / nl + right * right / nr - parent;
                if (gain > best.gain + 1e-12) {
                    best.found = true;
                    best.feature = static_cast<int>(f);
                    best.threshold = v0 + 0.5 * (v1 - v0);
                    best.gain = gain;
                }
            }
        }
        return best;
    }

    int build(std::vector<std::size_t> rows, int depth) {
        const int id = static_cast<int>(tree.nodes.size());
        tree.nodes.emplace_back();

        Split split;
        if (depth < opt.max_depth && rows.size() >= static_cast<std::size_t>(opt.min_samples_split))
            split = best_split(rows);

        if (!split.found) {
            double num = 0.0, den = 0.0;
            for (std::size_t r : rows) {
                num += residual[r];
                den += hessian[r];
            }
            double value = num / std::max(den, 1e-12); // Newton step on logistic loss
            value = std::clamp(value, -opt.leaf_clamp, opt.leaf_clamp);
            tree.nodes[static_cast<std::size_t>(id)].value = value;
            return id;
        }

        std::vector<std::size_t> left, right;
        for (std::size_t r : rows)
            (x(r, static_cast<std::size_t>(split.feature)) <= split.threshold ? left : right)
                .push_back(r);
        rows.clear();
        rows.shrink_to_fit();

        const int l = build(std::move(left), depth + 1);
        const int r = build(std::move(right), depth + 1);
        GbtTree::Node& nd = tree.nodes[static_cast<std::size_t>(id)];
        nd.feature = split.feature;
        nd.threshold = split.threshold;
        nd.left = l;
        nd.right = r;
        return id;
    }
};

} // namespace

GbtModel gbt_train(const Matrix& x, std::span<const int> labels, const GbtOptions& options) {
    const std::size_t n = x.rows;
    if (labels.size() != n) throw std::runtime_error("gbt: label count != row count");
    if (n < 2) throw std::runtime_error("gbt: need at least 2 rows");
    if (options.n_trees < 1 || options.max_depth < 1 || options.learning_rate <= 0.0 ||
        options.subsample <= 0.0 || options.subsample > 1.0)
        throw std::runtime_error("gbt: bad options");

    int lo = labels[0], hi = labels[0];
    for (int v : labels) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    if (lo == hi) throw std::runtime_error("gbt: need two classes");
    std::vector<double> y(n);
    for (std::size_t t = 0; t < n; ++t) {
        if (labels[t] != lo && labels[t] != hi) throw std::runtime_error("gbt: more than two classes");
        y[t] = labels[t] == hi ? 1.0 : 0.0;
    }

    GbtModel model;
    model.learning_rate = options.learning_rate;
    const double prevalence =
        std::clamp(std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n), 1e-6, 1.0 - 1e-6);
    model.base_score = std::log(prevalence / (1.0 - prevalence));

    std::vector<double> score(n, model.base_score);
    std::vector<double> residual(n), hessian(n);
    std::vector<std::size_t> all_rows(n);
    std::iota(all_rows.begin(), all_rows.end(), std::size_t{0});

    for (int t = 0; t < options.n_trees; ++t) {
        for (std::size_t r = 0; r < n; ++r) {
            const double p = sigmoid(score[r]);
            residual[r] = y[r] - p;
            hessian[r] = p * (1.0 - p);
        }

        std::vector<std::size_t> rows = all_rows;
        if (options.subsample < 1.0) {
            Rng rng(combine_seeds(options.seed, static_cast<std::uint64_t>(t)));
            rng.shuffle(rows);
            const auto keep = std::max<std::size_t>(
                1, static_cast<std::size_t>(options.subsample * static_cast<double>(n)));
            rows.resize(keep);
            std::sort(rows.begin(), rows.end());
        }

        TreeBuilder builder{x, residual, hessian, options, {}};
        builder.build(std::move(rows), 0);
        for (std::size_t r = 0; r < n; ++r)
            score[r] += options.learning_rate * builder.tree.predict(x.row(r));
        model.trees.push_back(std::move(builder.tree));
    }
    return model;
}

std::vector<double> gbt_predict_proba(const GbtModel& model, const Matrix& x) {
    std::vector<double> proba(x.rows);
    for (std::size_t r = 0; r < x.rows; ++r) {
        double f = model.base_score;
        for (const auto& tree : model.trees) f += model.learning_rate * tree.predict(x.row(r));
        proba[r] = sigmoid(f);
    }
    return proba;
}

std::vector<int> gbt_predict(const GbtModel& model, const Matrix& x) {
    const auto proba = gbt_predict_proba(model, x);
    std::vector<int> labels(proba.size());
    for (std::size_t r = 0; r < proba.size(); ++r) labels[r] = proba[r] >= 0.5 ? 1 : -1;
    return labels;
}

void save_gbt(const GbtModel& model, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("gbt: cannot write " + path);
    out.precision(17);
    out << "gbt " << model.trees.size() << ' ' << model.base_score << ' ' << model.learning_rate
        << '\n';
    for (const auto& tree : model.trees) {
        out << "tree " << tree.nodes.size() << '\n';
        for (const auto& nd : tree.nodes)
            out << nd.feature << ' ' << nd.threshold << ' ' << nd.value << ' ' << nd.left << ' '
                << nd.right << '\n';
    }
}

GbtModel load_gbt(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("gbt: cannot open " + path);
    std::string tag;
    std::size_t n_trees = 0;
    GbtModel model;
    if (!(in >> tag >> n_trees >> model.base_score >> model.learning_rate) || tag != "gbt")
        throw std::runtime_error("gbt: bad model file " + path);
    for (std::size_t t = 0; t < n_trees; ++t) {
        std::size_t n_nodes = 0;
        if (!(in >> tag >> n_nodes) || tag != "tree")
            throw std::runtime_error("gbt: bad tree header in " + path);
        GbtTree tree;
        tree.nodes.resize(n_nodes);
        for (auto& nd : tree.nodes)
            if (!(in >> nd.feature >> nd.threshold >> nd.value >> nd.left >> nd.right))
                throw std::runtime_error("gbt: truncated tree in " + path);
        model.trees.push_back(std::move(tree));
    }
    return model;
}

} // namespace quenchmap
