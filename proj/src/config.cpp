#include "quenchmap/config.hpp"

#include <algorithm>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "quenchmap/csv_io.hpp"

namespace quenchmap {

std::string model_name(ModelKind kind) {
    switch (kind) {
        case ModelKind::svm: return "svm";
        case ModelKind::svm_fidelity: return "svm_fidelity";
        case ModelKind::gbt: return "gbt";
    }
    throw std::runtime_error("config: bad model kind");
}

std::string representation_name(Representation repr) {
    return repr == Representation::raw ? "raw" : "aqfm";
}

namespace {

std::string trim(std::string s) {
    s.erase(0, s.find_first_not_of(" \t\r"));
    s.erase(s.find_last_not_of(" \t\r") + 1);
    return s;
}

std::vector<std::string> split_list(const std::string& value) {
    std::vector<std::string> items;
    std::string item;
    std::istringstream ss(value);
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) items.push_back(item);
    }
    return items;
}

double to_double(const std::string& key, const std::string& value) {
    double v;
    if (!parse_double(value, v)) throw std::runtime_error("config: " + key + ": not a number: " + value);
    return v;
}

long to_int(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        long v = std::stol(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw std::runtime_error("config: " + key + ": not an integer: " + value);
    }
}

bool to_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "yes" || value == "1") return true;
    if (value == "false" || value == "no" || value == "0") return false;
    throw std::runtime_error("config: " + key + ": not a boolean: " + value);
}

ModelKind to_model(const std::string& value) {
    if (value == "svm") return ModelKind::svm;
    if (value == "svm_fidelity") return ModelKind::svm_fidelity;
    if (value == "gbt") return ModelKind::gbt;
    throw std::runtime_error("config: unknown model: " + value);
}

} // namespace

void apply_config_line(ExperimentConfig& config, const std::string& raw_line) {
    const std::string line = trim(raw_line.substr(0, raw_line.find('#')));
    if (line.empty()) return;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw std::runtime_error("config: expected key = value: " + line);
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty())
        throw std::runtime_error("config: expected key = value: " + line);

    if (key == "dataset") config.dataset_path = value;
    else if (key == "label_column") config.label_column = value;
    else if (key == "top_k") {
        if (value == "none") config.top_k.reset();
        else config.top_k = static_cast<std::size_t>(to_int(key, value));
    } else if (key == "mi_threshold") config.mi_threshold = to_double(key, value);
    else if (key == "mi_bins") config.mi_bins = static_cast<int>(to_int(key, value));
    else if (key == "corr_threshold") config.encoding.corr_threshold = to_double(key, value);
    else if (key == "max_degree") {
        if (value == "none") config.encoding.max_degree.reset();
        else config.encoding.max_degree = static_cast<int>(to_int(key, value));
    } else if (key == "coupling_scale") config.encoding.coupling_scale = to_double(key, value);
    else if (key == "h_max") config.encoding.h_max = to_double(key, value);
    else if (key == "j_max") config.encoding.j_max = to_double(key, value);
    else if (key == "schedule") {
        if (value == "linear") {
            config.schedule.kind = ScheduleKind::linear;
            config.schedule.table.clear();
        } else if (value.rfind("ghz:", 0) == 0) {
            config.schedule = load_schedule_csv(value.substr(4), EnergyUnit::ghz);
        } else if (value.rfind("rad:", 0) == 0) {
            config.schedule = load_schedule_csv(value.substr(4), EnergyUnit::rad_per_ns);
        } else {
            throw std::runtime_error("config: schedule must be 'linear', 'ghz:<csv>' or 'rad:<csv>'");
        }
    } else if (key == "gamma0") config.schedule.gamma0 = to_double(key, value);
    else if (key == "beta0") config.schedule.beta0 = to_double(key, value);
    else if (key == "tau_list") {
        config.tau_list.clear();
        for (const auto& item : split_list(value)) config.tau_list.push_back(to_double(key, item));
        if (config.tau_list.empty()) throw std::runtime_error("config: tau_list is empty");
    } else if (key == "dt_ns") config.dt_ns = to_double(key, value);
    else if (key == "shots") {
        if (value == "none") config.shots.reset();
        else config.shots = static_cast<int>(to_int(key, value));
    } else if (key == "include_zz") config.include_zz = to_bool(key, value);
    else if (key == "seed") config.seed = static_cast<std::uint64_t>(to_int(key, value));
    else if (key == "models") {
        config.models.clear();
        for (const auto& item : split_list(value)) config.models.push_back(to_model(item));
        if (config.models.empty()) throw std::runtime_error("config: models is empty");
    } else if (key == "svm_c") {
        config.grids.svm_c.clear();
        for (const auto& item : split_list(value)) config.grids.svm_c.push_back(to_double(key, item));
    } else if (key == "gbt_trees") {
        config.grids.gbt_trees.clear();
        for (const auto& item : split_list(value))
            config.grids.gbt_trees.push_back(static_cast<int>(to_int(key, item)));
    } else if (key == "gbt_depth") {
        config.grids.gbt_depth.clear();
        for (const auto& item : split_list(value))
            config.grids.gbt_depth.push_back(static_cast<int>(to_int(key, item)));
    } else if (key == "gbt_rate") {
        config.grids.gbt_rate.clear();
        for (const auto& item : split_list(value)) config.grids.gbt_rate.push_back(to_double(key, item));
    } else if (key == "nested_grid_search") config.nested_grid_search = to_bool(key, value);
    else if (key == "n_splits") config.n_splits = static_cast<int>(to_int(key, value));
    else if (key == "n_repeats") config.n_repeats = static_cast<int>(to_int(key, value));
    else if (key == "cv_seed") config.cv_seed = static_cast<std::uint64_t>(to_int(key, value));
    else if (key == "jobs") config.jobs = static_cast<int>(to_int(key, value));
    else throw std::runtime_error("config: unknown key: " + key);
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("config: cannot open " + path);
    ExperimentConfig config;
    std::string line;
    while (std::getline(in, line)) apply_config_line(config, line);
    return config;
}

void write_config(const ExperimentConfig& config, std::ostream& out) {
    auto list = [](const auto& values) {
        std::string s;
        for (const auto& v : values) {
            if (!s.empty()) s += ',';
            if constexpr (std::is_same_v<std::decay_t<decltype(v)>, double>) s += format_double(v);
            else s += std::to_string(v);
        }
        return s;
    };

    out << "dataset = " << config.dataset_path << '\n';
    out << "label_column = " << config.label_column << '\n';
    out << "top_k = " << (config.top_k ? std::to_string(*config.top_k) : "none") << '\n';
    out << "mi_threshold = " << format_double(config.mi_threshold) << '\n';
    out << "mi_bins = " << config.mi_bins << '\n';
    out << "corr_threshold = " << format_double(config.encoding.corr_threshold) << '\n';
    out << "max_degree = "
        << (config.encoding.max_degree ? std::to_string(*config.encoding.max_degree) : "none") << '\n';
    out << "coupling_scale = " << format_double(config.encoding.coupling_scale) << '\n';
    out << "h_max = " << format_double(config.encoding.h_max) << '\n';
    out << "j_max = " << format_double(config.encoding.j_max) << '\n';
    out << "# schedule echoed as a descriptor; tabulated tables reload from their CSV\n";
    out << "# schedule = " << schedule_descriptor(config.schedule) << '\n';
    if (config.schedule.kind == ScheduleKind::linear) {
        out << "schedule = linear\n";
        out << "gamma0 = " << format_double(config.schedule.gamma0) << '\n';
        out << "beta0 = " << format_double(config.schedule.beta0) << '\n';
    }
    out << "tau_list = " << list(config.tau_list) << '\n';
    out << "dt_ns = " << format_double(config.dt_ns) << '\n';
    out << "shots = " << (config.shots ? std::to_string(*config.shots) : "none") << '\n';
    out << "include_zz = " << (config.include_zz ? "true" : "false") << '\n';
    out << "seed = " << config.seed << '\n';
    std::string models;
    for (auto m : config.models) {
        if (!models.empty()) models += ',';
        models += model_name(m);
    }
    out << "models = " << models << '\n';
    out << "svm_c = " << list(config.grids.svm_c) << '\n';
    out << "gbt_trees = " << list(config.grids.gbt_trees) << '\n';
    out << "gbt_depth = " << list(config.grids.gbt_depth) << '\n';
    out << "gbt_rate = " << list(config.grids.gbt_rate) << '\n';
    out << "nested_grid_search = " << (config.nested_grid_search ? "true" : "false") << '\n';
    out << "n_splits = " << config.n_splits << '\n';
    out << "n_repeats = " << config.n_repeats << '\n';
    out << "cv_seed = " << config.cv_seed << '\n';
    out << "jobs = " << config.jobs << '\n';
}

std::uint64_t config_fingerprint(const ExperimentConfig& config) {
    std::ostringstream buf;
    write_config(config, buf);
    std::string text = buf.str();
    // jobs only schedules work; it must not invalidate a resume ledger
    const auto jobs_pos = text.rfind("jobs = ");
    if (jobs_pos != std::string::npos) text.erase(jobs_pos);
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 0x100000001b3ull;
    }
    return h;
}

} // namespace quenchmap
