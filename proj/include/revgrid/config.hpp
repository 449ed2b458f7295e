#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "revgrid/tcl.hpp"

namespace revgrid {

/// Sectioned key = value configuration text. '#' starts a comment; keys live
/// under the most recent [section] header. Parse and lookup errors carry the
/// file/line they refer to.
class ConfigFile {
public:
    static ConfigFile parse_file(const std::string& path);
    static ConfigFile parse_string(const std::string& text, const std::string& origin);

    bool has(const std::string& section, const std::string& key) const;
    std::string get_string(const std::string& section, const std::string& key) const;
    std::string get_string_or(const std::string& section, const std::string& key,
                              const std::string& fallback) const;
    double get_double(const std::string& section, const std::string& key) const;
    double get_double_or(const std::string& section, const std::string& key, double fallback) const;
    int get_int(const std::string& section, const std::string& key) const;
    int get_int_or(const std::string& section, const std::string& key, int fallback) const;
    std::uint64_t get_u64_or(const std::string& section, const std::string& key,
                             std::uint64_t fallback) const;
    std::vector<int> get_int_list(const std::string& section, const std::string& key) const;

    /// section -> key -> value, in sorted order (stable echo for manifests).
    const std::map<std::string, std::map<std::string, std::string>>& sections() const {
        return sections_;
    }

private:
    std::string origin_;
    std::map<std::string, std::map<std::string, std::string>> sections_;
    std::map<std::string, int> lines_;  // "section.key" -> line number

    [[noreturn]] void fail(const std::string& section, const std::string& key,
                           const std::string& why) const;
};

/// Typed experiment description shared by the CLI commands.
struct ExperimentConfig {
    std::string family;  // "tcl" or "lqr"
    std::vector<int> dims;
    std::vector<int> particle_counts;
    double horizon = 0.0;
    int steps = 0;
    int degree = 2;
    std::string scheme;  // "backward", "forward" or "both"
    std::uint64_t population_seed = 1;
    std::uint64_t grid_seed = 2;
    std::uint64_t eval_seed = 3;
    int replicates = 2;  // N_grid
    int eval_paths = 2;  // M
    int threads = 1;
    int population_draws = 1000;
    double deviation_amplitude = 0.2;

    tcl::ParamRanges tcl_ranges;

    struct Lqr {
        double action_bound = 10.0;
        double sigma = 0.1;
        double x0 = 1.0;
        double terminal_mean = 0.0;
        double terminal_cov = 1.0;
    } lqr;

    ConfigFile raw;  // parsed text, echoed into manifests

    static ExperimentConfig from_file(const std::string& path);
    void validate() const;  // throws ConfigError
    bool run_backward() const { return scheme == "backward" || scheme == "both"; }
    bool run_forward() const { return scheme == "forward" || scheme == "both"; }
};

}  // namespace revgrid
