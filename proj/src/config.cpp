#include "qc/config.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "qc/csv.hpp"

namespace qc {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a])))
        ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1])))
        --b;
    return s.substr(a, b - a);
}

double parse_double(const std::string& key, const std::string& value) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(value, &pos);
    } catch (const std::exception&) {
        throw std::invalid_argument("config: bad number for '" + key + "': " + value);
    }
    if (pos != value.size())
        throw std::invalid_argument("config: trailing junk for '" + key + "': " + value);
    return v;
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
    std::size_t pos = 0;
    std::uint64_t v = 0;
    try {
        v = std::stoull(value, &pos);
    } catch (const std::exception&) {
        throw std::invalid_argument("config: bad integer for '" + key + "': " + value);
    }
    if (pos != value.size())
        throw std::invalid_argument("config: trailing junk for '" + key + "': " + value);
    return v;
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1")
        return true;
    if (value == "false" || value == "0")
        return false;
    throw std::invalid_argument("config: bad boolean for '" + key + "': " + value);
}

std::vector<double> parse_double_list(const std::string& key, const std::string& value) {
    std::vector<double> out;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty())
            out.push_back(parse_double(key, item));
    }
    return out;
}

std::vector<double> load_matrix_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("config: cannot open coupling matrix file: " + path);
    std::vector<double> values;
    std::string line;
    while (std::getline(in, line)) {
        line = trim(line);
        if (line.empty() || line[0] == '#')
            continue;
        std::stringstream ss(line);
        std::string item;
        while (std::getline(ss, item, ','))
            values.push_back(parse_double("coupling_matrix", trim(item)));
    }
    return values;
}

std::string join_doubles(const std::vector<double>& values) {
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i)
            out += ',';
        out += format_g17(values[i]);
    }
    return out;
}

} // namespace

const char* to_string(AmplitudeVariant v) {
    switch (v) {
    case AmplitudeVariant::difference: return "difference";
    case AmplitudeVariant::ratio: return "ratio";
    case AmplitudeVariant::other_only: return "other_only";
    case AmplitudeVariant::cosine_factor: return "cosine_factor";
    case AmplitudeVariant::none: return "none";
    }
    return "difference";
}

const char* to_string(DriftTimeScaling s) {
    return s == DriftTimeScaling::lambda_scaled ? "lambda_scaled" : "real_time";
}

static AmplitudeVariant parse_variant(const std::string& value) {
    if (value == "difference") return AmplitudeVariant::difference;
    if (value == "ratio") return AmplitudeVariant::ratio;
    if (value == "other_only") return AmplitudeVariant::other_only;
    if (value == "cosine_factor") return AmplitudeVariant::cosine_factor;
    if (value == "none") return AmplitudeVariant::none;
    throw std::invalid_argument("config: unknown amplitude_variant: " + value);
}

void apply_config_entry(NetworkConfig& cfg, const std::string& key,
                        const std::string& value) {
    if (key == "n")
        cfg.n = static_cast<std::size_t>(parse_u64(key, value));
    else if (key == "coupling_norm")
        cfg.coupling_norm = parse_double(key, value);
    else if (key == "coupling_norm_values")
        cfg.coupling_norm_values = parse_double_list(key, value);
    else if (key == "sweep_n_values") {
        cfg.sweep_n_values.clear();
        for (double v : parse_double_list(key, value))
            cfg.sweep_n_values.push_back(static_cast<std::size_t>(v));
    } else if (key == "omega_mean")
        cfg.omega_mean = parse_double(key, value);
    else if (key == "omega_sd")
        cfg.omega_sd = parse_double(key, value);
    else if (key == "clip_sds")
        cfg.clip_sds = parse_double(key, value);
    else if (key == "dt")
        cfg.dt = parse_double(key, value);
    else if (key == "n_steps")
        cfg.n_steps = static_cast<std::size_t>(parse_u64(key, value));
    else if (key == "burn_in")
        cfg.burn_in = static_cast<std::size_t>(parse_u64(key, value));
    else if (key == "realizations")
        cfg.realizations = static_cast<std::size_t>(parse_u64(key, value));
    else if (key == "seed")
        cfg.seed = parse_u64(key, value);
    else if (key == "amplitude_rescale")
        cfg.amplitude_rescale = parse_double(key, value);
    else if (key == "epsilon_floor")
        cfg.epsilon_floor = parse_double(key, value);
    else if (key == "ratio_factor")
        cfg.coupling.phase_amplitude_ratio_factor = parse_bool(key, value);
    else if (key == "amplitude_variant")
        cfg.coupling.amplitude_variant = parse_variant(value);
    else if (key == "drift_time_scaling") {
        if (value == "real_time")
            cfg.drift_time_scaling = DriftTimeScaling::real_time;
        else if (value == "lambda_scaled")
            cfg.drift_time_scaling = DriftTimeScaling::lambda_scaled;
        else
            throw std::invalid_argument("config: unknown drift_time_scaling: " + value);
    } else if (key == "explosion_threshold")
        cfg.explosion_threshold = parse_double(key, value);
    else if (key == "snapshot_times")
        cfg.snapshot_times = parse_double_list(key, value);
    else if (key == "snapshot_window")
        cfg.snapshot_window = parse_double(key, value);
    else if (key == "threads")
        cfg.threads = static_cast<unsigned>(parse_u64(key, value));
    else if (key == "coupling_matrix_file") {
        cfg.coupling_matrix_file = value;
        if (!value.empty()) {
            cfg.coupling.kind = CouplingSpec::Kind::explicit_matrix;
            cfg.coupling.matrix = load_matrix_file(value);
        }
    } else
        throw std::invalid_argument("config: unknown key: " + key);
}

NetworkConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("config: cannot open " + path);
    NetworkConfig cfg;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos)
            line = line.substr(0, hash);
        line = trim(line);
        if (line.empty())
            continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config: missing '=' at " + path + ":" +
                                        std::to_string(line_no));
        apply_config_entry(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return cfg;
}

std::string config_echo(const NetworkConfig& cfg) {
    std::string out;
    out += "# run configuration echo; load with --config to reproduce\n";
    out += "n = " + std::to_string(cfg.n) + "\n";
    out += "coupling_norm = " + format_g17(cfg.coupling_norm) + "\n";
    out += "coupling_norm_values = " +
           join_doubles(cfg.coupling_norm_values.empty() ? default_coupling_norms()
                                                         : cfg.coupling_norm_values) +
           "\n";
    {
        std::string ns;
        for (std::size_t i = 0; i < cfg.sweep_n_values.size(); ++i) {
            if (i)
                ns += ',';
            ns += std::to_string(cfg.sweep_n_values[i]);
        }
        out += "sweep_n_values = " + ns + "\n";
    }
    out += "omega_mean = " + format_g17(cfg.omega_mean) + "\n";
    out += "omega_sd = " + format_g17(cfg.omega_sd) + "\n";
    out += "clip_sds = " + format_g17(cfg.clip_sds) + "\n";
    out += "dt = " + format_g17(cfg.dt) + "\n";
    out += "n_steps = " + std::to_string(cfg.n_steps) + "\n";
    out += "burn_in = " + std::to_string(cfg.burn_in) + "\n";
    out += "realizations = " + std::to_string(cfg.realizations) + "\n";
    out += "seed = " + std::to_string(cfg.seed) + "\n";
    out += "amplitude_rescale = " + format_g17(cfg.amplitude_rescale) + "\n";
    out += "epsilon_floor = " + format_g17(cfg.epsilon_floor) + "\n";
    out += std::string("ratio_factor = ") +
           (cfg.coupling.phase_amplitude_ratio_factor ? "true" : "false") + "\n";
    out += std::string("amplitude_variant = ") + to_string(cfg.coupling.amplitude_variant) + "\n";
    out += std::string("drift_time_scaling = ") + to_string(cfg.drift_time_scaling) + "\n";
    out += "explosion_threshold = " + format_g17(cfg.explosion_threshold) + "\n";
    out += "snapshot_times = " + join_doubles(cfg.snapshot_times) + "\n";
    out += "snapshot_window = " + format_g17(cfg.snapshot_window) + "\n";
    out += "threads = " + std::to_string(cfg.threads) + "\n";
    out += "coupling_matrix_file = " + cfg.coupling_matrix_file + "\n";
    return out;
}

void write_config_echo(const NetworkConfig& cfg, const std::string& path) {
    std::ofstream outfile(path, std::ios::binary);
    if (!outfile)
        throw std::runtime_error("config: cannot write " + path);
    outfile << config_echo(cfg);
    if (!outfile)
        throw std::runtime_error("config: write failed for " + path);
}

} // namespace qc
