#include "quenchmap/features.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "quenchmap/csv_io.hpp"

namespace quenchmap {

std::vector<double> QuantumFeatureVector::flat() const {
    std::vector<double> out = z;
    out.insert(out.end(), zz.begin(), zz.end());
    return out;
}

static std::uint64_t fnv1a(std::uint64_t h, const void* data, std::size_t len) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t k = 0; k < len; ++k) {
        h ^= p[k];
        h *= 0x100000001b3ull;
    }
    return h;
}

/// Hash of everything that determines one sample's features.
static std::uint64_t feature_key(std::span<const double> x, const CouplingGraph& graph,
                                 const FeatureMapOptions& options, std::uint64_t row_seed) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    h = fnv1a(h, x.data(), x.size() * sizeof(double));
    h = fnv1a(h, &graph.n, sizeof graph.n);
    for (const auto& e : graph.edges) {
        h = fnv1a(h, &e.i, sizeof e.i);
        h = fnv1a(h, &e.j, sizeof e.j);
        h = fnv1a(h, &e.weight, sizeof e.weight);
    }
    const std::string sched = schedule_descriptor(options.quench.schedule);
    h = fnv1a(h, sched.data(), sched.size());
    h = fnv1a(h, &options.quench.schedule.tau_ns, sizeof(double));
    h = fnv1a(h, &options.quench.dt_ns, sizeof(double));
    h = fnv1a(h, &options.h_max, sizeof(double));
    const int zz = options.include_zz ? 1 : 0;
    h = fnv1a(h, &zz, sizeof zz);
    const int shots = options.shots.value_or(0);
    h = fnv1a(h, &shots, sizeof shots);
    if (shots) h = fnv1a(h, &row_seed, sizeof row_seed);
    return h;
}

static std::string cache_path(const std::string& dir, std::uint64_t key) {
    char name[32];
    std::snprintf(name, sizeof name, "qfm_%016llx.txt", static_cast<unsigned long long>(key));
    return dir + "/" + name;
}

static bool cache_read(const std::string& path, std::size_t n_z, std::size_t n_zz,
                       QuantumFeatureVector& out) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return false;
    QuantumFeatureVector fv;
    fv.z.resize(n_z);
    fv.zz.resize(n_zz);
    for (auto& v : fv.z)
        if (!(in >> v)) return false;
    for (auto& v : fv.zz)
        if (!(in >> v)) return false;
    out = std::move(fv);
    return true;
}

static void cache_write(const std::string& dir, const std::string& path,
                        const QuantumFeatureVector& fv) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) return; // cache is best-effort
        for (double v : fv.z) out << format_double(v) << '\n';
        for (double v : fv.zz) out << format_double(v) << '\n';
    }
    std::filesystem::rename(tmp, path, ec); // atomic publish; failure just misses
}

static QuantumFeatureVector map_sample_impl(std::span<const double> x, const CouplingGraph& graph,
                                            const FeatureMapOptions& options, std::uint64_t row_seed,
                                            StateVector* keep_state) {
    const IsingInstance inst = encode_sample(x, graph, options.h_max);
    StateVector psi = evolve(inst, options.quench);

    QuantumFeatureVector fv;
    const std::size_t n = static_cast<std::size_t>(graph.n);
    fv.z.resize(n);
    if (options.include_zz) fv.zz.resize(graph.edges.size());

    if (options.shots) {
        const auto samples = sample_bitstrings(psi, *options.shots, row_seed);
        fv.z = estimate_z_from_samples(samples, graph.n);
        if (options.include_zz) {
            for (std::size_t e = 0; e < graph.edges.size(); ++e) {
                const auto& edge = graph.edges[e];
                double acc = 0.0;
                for (std::uint64_t b : samples) {
                    const bool anti = (((b >> edge.i) ^ (b >> edge.j)) & 1) != 0;
                    acc += anti ? -1.0 : 1.0;
                }
                fv.zz[e] = acc / static_cast<double>(samples.size());
            }
        }
    } else {
        for (std::size_t i = 0; i < n; ++i) fv.z[i] = expect_z(psi, static_cast<int>(i));
        if (options.include_zz)
            for (std::size_t e = 0; e < graph.edges.size(); ++e)
                fv.zz[e] = expect_zz(psi, graph.edges[e].i, graph.edges[e].j);
    }
    if (keep_state) *keep_state = std::move(psi);
    return fv;
}

QuantumFeatureVector map_sample(std::span<const double> x, const CouplingGraph& graph,
                                const FeatureMapOptions& options, std::uint64_t row_seed) {
    if (!options.cache_dir.empty()) {
        const std::string path = cache_path(options.cache_dir, feature_key(x, graph, options, row_seed));
        QuantumFeatureVector cached;
        const std::size_t n_zz = options.include_zz ? graph.edges.size() : 0;
        if (cache_read(path, static_cast<std::size_t>(graph.n), n_zz, cached)) return cached;
        QuantumFeatureVector fv = map_sample_impl(x, graph, options, row_seed, nullptr);
        cache_write(options.cache_dir, path, fv);
        return fv;
    }
    return map_sample_impl(x, graph, options, row_seed, nullptr);
}

MappedDataset map_dataset(const Matrix& x, std::span<const int> labels, const CouplingGraph& graph,
                          const FeatureMapOptions& options, std::vector<StateVector>* keep_states) {
    if (x.rows != labels.size()) throw std::runtime_error("map_dataset: label count != row count");
    if (x.cols != static_cast<std::size_t>(graph.n))
        throw std::runtime_error("map_dataset: feature count != coupling graph size");

    MappedDataset mapped;
    const std::size_t n_zz = options.include_zz ? graph.edges.size() : 0;
    mapped.features = Matrix(x.rows, static_cast<std::size_t>(graph.n) + n_zz);
    mapped.labels.assign(labels.begin(), labels.end());
    if (keep_states) keep_states->resize(x.rows);

    for (std::size_t i = 0; i < x.rows; ++i) {
        const std::uint64_t row_seed = combine_seeds(options.seed, i);
        QuantumFeatureVector fv;
        if (keep_states) {
            fv = map_sample_impl(x.row(i), graph, options, row_seed, &(*keep_states)[i]);
        } else {
            fv = map_sample(x.row(i), graph, options, row_seed);
        }
        const auto flat = fv.flat();
        for (std::size_t j = 0; j < flat.size(); ++j) mapped.features(i, j) = flat[j];
    }

    for (int q = 0; q < graph.n; ++q) mapped.column_names.push_back("z" + std::to_string(q));
    if (options.include_zz)
        for (const auto& e : graph.edges)
            mapped.column_names.push_back("zz" + std::to_string(e.i) + "_" + std::to_string(e.j));

    mapped.provenance.n_qubits = graph.n;
    mapped.provenance.n_edges = graph.edges.size();
    mapped.provenance.schedule = schedule_descriptor(options.quench.schedule);
    mapped.provenance.tau_ns = options.quench.schedule.tau_ns;
    mapped.provenance.dt_ns = options.quench.dt_ns;
    mapped.provenance.include_zz = options.include_zz;
    mapped.provenance.shots = options.shots.value_or(0);
    mapped.provenance.seed = options.seed;
    return mapped;
}

void save_mapped_csv(const MappedDataset& mapped, const std::string& path) {
    std::vector<std::string> header{"label"};
    header.insert(header.end(), mapped.column_names.begin(), mapped.column_names.end());
    std::vector<std::vector<std::string>> rows(mapped.features.rows);
    for (std::size_t i = 0; i < mapped.features.rows; ++i) {
        rows[i].push_back(std::to_string(mapped.labels[i]));
        for (double v : mapped.features.row(i)) rows[i].push_back(format_double(v));
    }
    write_csv(path, header, rows);

    std::ofstream side(path + ".provenance", std::ios::binary);
    if (!side) throw std::runtime_error("features: cannot write " + path + ".provenance");
    const auto& p = mapped.provenance;
    side << "n_qubits = " << p.n_qubits << '\n'
         << "n_edges = " << p.n_edges << '\n'
         << "schedule = " << p.schedule << '\n'
         << "tau_ns = " << format_double(p.tau_ns) << '\n'
         << "dt_ns = " << format_double(p.dt_ns) << '\n'
         << "include_zz = " << (p.include_zz ? "true" : "false") << '\n'
         << "shots = " << p.shots << '\n'
         << "seed = " << p.seed << '\n';
}

MappedDataset load_mapped_csv(const std::string& path) {
    const CsvTable table = read_csv(path);
    if (table.header.empty() || table.header[0] != "label")
        throw std::runtime_error("features: " + path + " is not a mapped-dataset CSV");

    MappedDataset mapped;
    mapped.column_names.assign(table.header.begin() + 1, table.header.end());
    mapped.features = Matrix(table.rows.size(), mapped.column_names.size());
    mapped.labels.resize(table.rows.size());
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        double label;
        if (!parse_double(table.rows[i][0], label))
            throw std::runtime_error("features: bad label in " + path);
        mapped.labels[i] = static_cast<int>(label);
        for (std::size_t j = 1; j < table.header.size(); ++j) {
            double v;
            if (!parse_double(table.rows[i][j], v))
                throw std::runtime_error("features: bad cell in " + path);
            mapped.features(i, j - 1) = v;
        }
    }

    std::ifstream side(path + ".provenance", std::ios::binary);
    if (side) {
        std::string line;
        auto& p = mapped.provenance;
        while (std::getline(side, line)) {
            const auto eq = line.find('=');
            if (eq == std::string::npos) continue;
            std::string key = line.substr(0, eq);
            std::string value = line.substr(eq + 1);
            auto trim = [](std::string& s) {
                s.erase(0, s.find_first_not_of(" \t"));
                s.erase(s.find_last_not_of(" \t") + 1);
            };
            trim(key);
            trim(value);
            if (key == "n_qubits") p.n_qubits = std::stoi(value);
            else if (key == "n_edges") p.n_edges = static_cast<std::size_t>(std::stoull(value));
            else if (key == "schedule") p.schedule = value;
            else if (key == "tau_ns") parse_double(value, p.tau_ns);
            else if (key == "dt_ns") parse_double(value, p.dt_ns);
            else if (key == "include_zz") p.include_zz = value == "true";
            else if (key == "shots") p.shots = std::stoi(value);
            else if (key == "seed") p.seed = std::stoull(value);
        }
    }
    return mapped;
}

} // namespace quenchmap
