#include "quenchmap/encoding.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "quenchmap/csv_io.hpp"

namespace quenchmap {

void CouplingGraph::validate(double j_max) const {
    std::pair<int, int> prev{-1, -1};
    for (const auto& e : edges) {
        if (e.i < 0 || e.j >= n || e.i >= e.j)
            throw std::runtime_error("couplings: bad edge indices");
        std::pair<int, int> cur{e.i, e.j};
        if (cur <= prev) throw std::runtime_error("couplings: edges not sorted/unique");
        prev = cur;
        if (std::abs(e.weight) > j_max + 1e-12)
            throw std::runtime_error("couplings: |J| exceeds j_max");
    }
}

double pearson(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw std::runtime_error("pearson: length mismatch");
    const std::size_t n = a.size();
    if (n < 2) throw std::runtime_error("pearson: need at least 2 samples");
    double ma = 0.0, mb = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        ma += a[i];
        mb += b[i];
    }
    ma /= static_cast<double>(n);
    mb /= static_cast<double>(n);
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double da = a[i] - ma, db = b[i] - mb;
        sab += da * db;
        saa += da * da;
        sbb += db * db;
    }
    if (saa == 0.0 || sbb == 0.0) return 0.0;
    return sab / std::sqrt(saa * sbb);
}

CouplingGraph fit_couplings(const Matrix& train_values, const EncodingOptions& opts) {
    if (train_values.rows < 2) throw std::runtime_error("fit_couplings: need at least 2 samples");
    const std::size_t d = train_values.cols;

    std::vector<std::vector<double>> columns(d, std::vector<double>(train_values.rows));
    for (std::size_t i = 0; i < train_values.rows; ++i)
        for (std::size_t j = 0; j < d; ++j) columns[j][i] = train_values(i, j);

    CouplingGraph graph;
    graph.n = static_cast<int>(d);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = i + 1; j < d; ++j) {
            double rho = pearson(columns[i], columns[j]);
            if (std::abs(rho) >= opts.corr_threshold)
                graph.edges.push_back({static_cast<int>(i), static_cast<int>(j),
                                       -opts.coupling_scale * rho});
        }

    if (opts.max_degree) {
        // Per node, rank its incident edges by |J| (ties by (i,j) order, which
        // the construction above already yields); an edge survives if either
        // endpoint ranks it within max_degree.
        std::vector<std::vector<std::size_t>> incident(d);
        for (std::size_t e = 0; e < graph.edges.size(); ++e) {
            incident[static_cast<std::size_t>(graph.edges[e].i)].push_back(e);
            incident[static_cast<std::size_t>(graph.edges[e].j)].push_back(e);
        }
        std::vector<char> keep(graph.edges.size(), 0);
        for (auto& list : incident) {
            std::stable_sort(list.begin(), list.end(), [&](std::size_t a, std::size_t b) {
                return std::abs(graph.edges[a].weight) > std::abs(graph.edges[b].weight);
            });
            for (std::size_t k = 0; k < list.size() && k < static_cast<std::size_t>(*opts.max_degree); ++k)
                keep[list[k]] = 1;
        }
        std::vector<CouplingGraph::Edge> kept;
        for (std::size_t e = 0; e < graph.edges.size(); ++e)
            if (keep[e]) kept.push_back(graph.edges[e]);
        graph.edges = std::move(kept);
    }

    graph.validate(opts.j_max);
    return graph;
}

IsingInstance encode_sample(std::span<const double> x, const CouplingGraph& couplings, double h_max) {
    if (x.size() != static_cast<std::size_t>(couplings.n))
        throw std::runtime_error("encode_sample: feature count != coupling graph size");
    IsingInstance inst;
    inst.n = couplings.n;
    inst.fields.resize(x.size());
    for (std::size_t i = 0; i < x.size(); ++i)
        inst.fields[i] = std::clamp(x[i], -h_max, h_max);
    inst.couplings = couplings;
    return inst;
}

std::vector<double> diagonal_energies(const IsingInstance& instance, int max_qubits) {
    if (instance.n < 0 || instance.n > max_qubits)
        throw std::runtime_error("diagonal_energies: qubit count above simulable cutoff");
    const std::size_t dim = std::size_t{1} << instance.n;
    std::vector<double> energies(dim, 0.0);
    for (int i = 0; i < instance.n; ++i) {
        const double h = instance.fields[static_cast<std::size_t>(i)];
        const std::size_t mask = std::size_t{1} << i;
        for (std::size_t b = 0; b < dim; ++b)
            energies[b] += (b & mask) ? -h : h;
    }
    for (const auto& e : instance.couplings.edges) {
        const std::size_t mi = std::size_t{1} << e.i;
        const std::size_t mj = std::size_t{1} << e.j;
        for (std::size_t b = 0; b < dim; ++b) {
            bool anti = ((b & mi) != 0) != ((b & mj) != 0);
            energies[b] += anti ? -e.weight : e.weight;
        }
    }
    return energies;
}

void save_couplings(const std::string& path, const CouplingGraph& graph) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("couplings: cannot write " + path);
    out << "n " << graph.n << '\n';
    for (const auto& e : graph.edges)
        out << "J " << e.i << ' ' << e.j << ' ' << format_double(e.weight) << '\n';
}

void save_instance(const std::string& path, const IsingInstance& instance) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("instance: cannot write " + path);
    out << "n " << instance.n << '\n';
    for (std::size_t i = 0; i < instance.fields.size(); ++i)
        out << "h " << i << ' ' << format_double(instance.fields[i]) << '\n';
    for (const auto& e : instance.couplings.edges)
        out << "J " << e.i << ' ' << e.j << ' ' << format_double(e.weight) << '\n';
}

static void parse_hj_lines(std::istream& in, const std::string& what, IsingInstance& inst) {
    std::string line;
    bool have_n = false;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ss(line);
        std::string tag;
        ss >> tag;
        if (tag == "n") {
            if (!(ss >> inst.n) || inst.n < 0) throw std::runtime_error(what + ": bad n line");
            inst.fields.assign(static_cast<std::size_t>(inst.n), 0.0);
            inst.couplings.n = inst.n;
            have_n = true;
        } else if (tag == "h") {
            std::size_t i;
            double v;
            if (!have_n || !(ss >> i >> v) || i >= inst.fields.size())
                throw std::runtime_error(what + ": bad h line: " + line);
            inst.fields[i] = v;
        } else if (tag == "J") {
            CouplingGraph::Edge e;
            if (!have_n || !(ss >> e.i >> e.j >> e.weight))
                throw std::runtime_error(what + ": bad J line: " + line);
            inst.couplings.edges.push_back(e);
        } else {
            throw std::runtime_error(what + ": unknown line tag: " + tag);
        }
    }
    if (!have_n) throw std::runtime_error(what + ": missing n line");
    std::sort(inst.couplings.edges.begin(), inst.couplings.edges.end(),
              [](const auto& a, const auto& b) { return std::pair(a.i, a.j) < std::pair(b.i, b.j); });
}

IsingInstance load_instance(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("instance: cannot open " + path);
    IsingInstance inst;
    parse_hj_lines(in, "instance", inst);
    return inst;
}

CouplingGraph load_couplings(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("couplings: cannot open " + path);
    IsingInstance inst;
    parse_hj_lines(in, "couplings", inst);
    for (double h : inst.fields)
        if (h != 0.0) throw std::runtime_error("couplings: file contains h lines");
    return inst.couplings;
}

} // namespace quenchmap
