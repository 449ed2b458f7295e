#include "revgrid/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "revgrid/regression.hpp"

namespace revgrid {

namespace {

std::string trim(const std::string& s) {
    auto begin = s.find_first_not_of(" \t\r");
    auto end = s.find_last_not_of(" \t\r");
    if (begin == std::string::npos) return {};
    return s.substr(begin, end - begin + 1);
}

}  // namespace

ConfigFile ConfigFile::parse_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open config file: " + path);
    std::ostringstream buffer;
    buffer << is.rdbuf();
    return parse_string(buffer.str(), path);
}

ConfigFile ConfigFile::parse_string(const std::string& text, const std::string& origin) {
    ConfigFile cfg;
    cfg.origin_ = origin;
    std::istringstream is(text);
    std::string line;
    std::string section;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        auto comment = line.find('#');
        if (comment != std::string::npos) line = line.substr(0, comment);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') {
                throw ConfigError(origin + ":" + std::to_string(lineno) +
                                  ": malformed section header '" + line + "'");
            }
            section = trim(line.substr(1, line.size() - 2));
            if (section.empty()) {
                throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty section name");
            }
            cfg.sections_[section];
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(origin + ":" + std::to_string(lineno) +
                              ": expected 'key = value', got '" + line + "'");
        }
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty()) {
            throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty key");
        }
        if (section.empty()) {
            throw ConfigError(origin + ":" + std::to_string(lineno) + ": key '" + key +
                              "' outside any [section]");
        }
        cfg.sections_[section][key] = value;
        cfg.lines_[section + "." + key] = lineno;
    }
    return cfg;
}

void ConfigFile::fail(const std::string& section, const std::string& key,
                      const std::string& why) const {
    auto it = lines_.find(section + "." + key);
    std::string where = origin_;
    if (it != lines_.end()) where += ":" + std::to_string(it->second);
    throw ConfigError(where + ": [" + section + "] " + key + ": " + why);
}

bool ConfigFile::has(const std::string& section, const std::string& key) const {
    auto sec = sections_.find(section);
    return sec != sections_.end() && sec->second.count(key) > 0;
}

std::string ConfigFile::get_string(const std::string& section, const std::string& key) const {
    auto sec = sections_.find(section);
    if (sec == sections_.end() || !sec->second.count(key)) fail(section, key, "missing");
    return sec->second.at(key);
}

std::string ConfigFile::get_string_or(const std::string& section, const std::string& key,
                                      const std::string& fallback) const {
    return has(section, key) ? get_string(section, key) : fallback;
}

double ConfigFile::get_double(const std::string& section, const std::string& key) const {
    const std::string raw = get_string(section, key);
    try {
        std::size_t used = 0;
        double v = std::stod(raw, &used);
        if (used != raw.size()) throw std::invalid_argument(raw);
        return v;
    } catch (const std::exception&) {
        fail(section, key, "not a number: '" + raw + "'");
    }
}

double ConfigFile::get_double_or(const std::string& section, const std::string& key,
                                 double fallback) const {
    return has(section, key) ? get_double(section, key) : fallback;
}

int ConfigFile::get_int(const std::string& section, const std::string& key) const {
    const std::string raw = get_string(section, key);
    try {
        std::size_t used = 0;
        long v = std::stol(raw, &used);
        if (used != raw.size()) throw std::invalid_argument(raw);
        return static_cast<int>(v);
    } catch (const std::exception&) {
        fail(section, key, "not an integer: '" + raw + "'");
    }
}

int ConfigFile::get_int_or(const std::string& section, const std::string& key, int fallback) const {
    return has(section, key) ? get_int(section, key) : fallback;
}

std::uint64_t ConfigFile::get_u64_or(const std::string& section, const std::string& key,
                                     std::uint64_t fallback) const {
    if (!has(section, key)) return fallback;
    const std::string raw = get_string(section, key);
    try {
        std::size_t used = 0;
        std::uint64_t v = std::stoull(raw, &used);
        if (used != raw.size()) throw std::invalid_argument(raw);
        return v;
    } catch (const std::exception&) {
        fail(section, key, "not an unsigned integer: '" + raw + "'");
    }
}

std::vector<int> ConfigFile::get_int_list(const std::string& section, const std::string& key) const {
    const std::string raw = get_string(section, key);
    std::vector<int> values;
    std::istringstream is(raw);
    std::string item;
    while (std::getline(is, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        try {
            std::size_t used = 0;
            values.push_back(static_cast<int>(std::stol(item, &used)));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            fail(section, key, "not an integer list entry: '" + item + "'");
        }
    }
    if (values.empty()) fail(section, key, "empty list");
    return values;
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
    ExperimentConfig cfg;
    cfg.raw = ConfigFile::parse_file(path);
    const ConfigFile& f = cfg.raw;

    cfg.family = f.get_string("experiment", "family");
    cfg.dims = f.get_int_list("experiment", "dims");
    cfg.particle_counts = f.get_int_list("experiment", "particles");
    cfg.horizon = f.get_double("experiment", "horizon");
    cfg.steps = f.get_int("experiment", "steps");
    cfg.degree = f.get_int_or("experiment", "degree", 2);
    cfg.scheme = f.get_string_or("experiment", "scheme", "both");
    cfg.population_seed = f.get_u64_or("experiment", "population_seed", 1);
    cfg.grid_seed = f.get_u64_or("experiment", "grid_seed", 2);
    cfg.eval_seed = f.get_u64_or("experiment", "eval_seed", 3);
    cfg.replicates = f.get_int_or("experiment", "replicates", 2);
    cfg.eval_paths = f.get_int_or("experiment", "eval_paths", 100);
    cfg.threads = f.get_int_or("experiment", "threads", 1);
    cfg.population_draws = f.get_int_or("experiment", "population_draws", 1000);
    cfg.deviation_amplitude = f.get_double_or("experiment", "deviation_amplitude", 0.2);

    tcl::ParamRanges& r = cfg.tcl_ranges;
    r.theta_min = f.get_double_or("tcl", "theta_min", r.theta_min);
    r.theta_max = f.get_double_or("tcl", "theta_max", r.theta_max);
    r.pmax_min = f.get_double_or("tcl", "pmax_min", r.pmax_min);
    r.pmax_max = f.get_double_or("tcl", "pmax_max", r.pmax_max);
    r.xbar_min = f.get_double_or("tcl", "xbar_min", r.xbar_min);
    r.xbar_max = f.get_double_or("tcl", "xbar_max", r.xbar_max);
    r.gamma_min = f.get_double_or("tcl", "gamma_min", r.gamma_min);
    r.gamma_max = f.get_double_or("tcl", "gamma_max", r.gamma_max);
    r.kappa = f.get_double_or("tcl", "kappa", r.kappa);
    r.sigma_load = f.get_double_or("tcl", "sigma_load", r.sigma_load);
    r.x_out = f.get_double_or("tcl", "x_out", r.x_out);
    r.eta = f.get_double_or("tcl", "eta", r.eta);
    r.lambda = f.get_double_or("tcl", "lambda", r.lambda);
    r.comfort_halfwidth = f.get_double_or("tcl", "comfort_halfwidth", r.comfort_halfwidth);
    r.loads_per_cluster = f.get_int_or("tcl", "loads_per_cluster", r.loads_per_cluster);
    r.horizon = cfg.horizon;
    r.steps = cfg.steps;

    cfg.lqr.action_bound = f.get_double_or("lqr", "action_bound", cfg.lqr.action_bound);
    cfg.lqr.sigma = f.get_double_or("lqr", "sigma", cfg.lqr.sigma);
    cfg.lqr.x0 = f.get_double_or("lqr", "x0", cfg.lqr.x0);
    cfg.lqr.terminal_mean = f.get_double_or("lqr", "terminal_mean", cfg.lqr.terminal_mean);
    cfg.lqr.terminal_cov = f.get_double_or("lqr", "terminal_cov", cfg.lqr.terminal_cov);

    cfg.validate();
    return cfg;
}

void ExperimentConfig::validate() const {
    if (family != "tcl" && family != "lqr") {
        throw ConfigError("experiment.family must be 'tcl' or 'lqr', got '" + family + "'");
    }
    if (scheme != "backward" && scheme != "forward" && scheme != "both") {
        throw ConfigError("experiment.scheme must be backward, forward or both, got '" + scheme +
                          "'");
    }
    if (dims.empty()) throw ConfigError("experiment.dims: empty list");
    for (int d : dims) {
        if (d < 1) throw ConfigError("experiment.dims: dimensions must be >= 1");
        if (family == "lqr" && d != 1) {
            throw ConfigError("experiment.dims: the lqr family is one-dimensional");
        }
    }
    if (particle_counts.empty()) throw ConfigError("experiment.particles: empty list");
    if (horizon <= 0.0) throw ConfigError("experiment.horizon must be positive");
    if (steps < 1) throw ConfigError("experiment.steps must be >= 1");
    if (degree != 1 && degree != 2) throw ConfigError("experiment.degree must be 1 or 2");
    if (replicates < 2) throw ConfigError("experiment.replicates must be >= 2");
    if (eval_paths < 2) throw ConfigError("experiment.eval_paths must be >= 2");
    if (threads < 1) throw ConfigError("experiment.threads must be >= 1");
    if (population_draws < 1) throw ConfigError("experiment.population_draws must be >= 1");
    for (int d : dims) {
        const int basis = basis_size(d, degree);
        for (int n_particles : particle_counts) {
            if (n_particles < basis) {
                throw ConfigError("under-determined regression: particles=" +
                                  std::to_string(n_particles) + " is below the basis size " +
                                  std::to_string(basis) + " at d=" + std::to_string(d));
            }
        }
    }
    if (family == "tcl") {
        const auto& r = tcl_ranges;
        if (r.theta_min > r.theta_max || r.pmax_min > r.pmax_max || r.xbar_min > r.xbar_max ||
            r.gamma_min > r.gamma_max) {
            throw ConfigError("tcl ranges: each interval needs min <= max");
        }
        if (r.theta_min <= 0 || r.pmax_min <= 0 || r.kappa <= 0 || r.sigma_load <= 0) {
            throw ConfigError("tcl ranges: theta, p_max, kappa, sigma_load must be positive");
        }
        if (r.loads_per_cluster < 1) throw ConfigError("tcl.loads_per_cluster must be >= 1");
    }
}

}  // namespace revgrid
