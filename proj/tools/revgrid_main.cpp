#include <CLI11.hpp>
#include <clocale>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "revgrid/experiment.hpp"
#include "revgrid/manifest.hpp"

namespace fs = std::filesystem;
using namespace revgrid;

namespace {

struct CommonOptions {
    std::string config_path;
    std::string out_dir;
    std::optional<std::uint64_t> seed_override;
    std::optional<int> threads_override;
};

void add_common(CLI::App* cmd, CommonOptions& opts) {
    cmd->add_option("--config", opts.config_path, "configuration file")->required();
    cmd->add_option("--out", opts.out_dir, "output directory")->required();
    cmd->add_option("--seed", opts.seed_override, "override the grid seed");
    cmd->add_option("--threads", opts.threads_override, "override the worker count");
}

ExperimentConfig load_config(const CommonOptions& opts) {
    ExperimentConfig cfg = ExperimentConfig::from_file(opts.config_path);
    if (opts.seed_override) cfg.grid_seed = *opts.seed_override;
    if (opts.threads_override) {
        if (*opts.threads_override < 1) throw ConfigError("--threads must be >= 1");
        cfg.threads = *opts.threads_override;
    }
    return cfg;
}

std::string format17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_diagnostics_csv(const std::string& path, const SolverOutput& out, int d,
                           bool with_grid_memory) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw Error(ErrorKind::InvalidInput, "cannot write " + path);
    os << "k,t";
    for (int i = 0; i < d; ++i) os << ",mean_" << i;
    for (int i = 0; i < d; ++i) os << ",cov_eig_" << i;
    os << ",drift_residual,zero_drift_residual,value_residual,design_condition,projected,"
          "regularized";
    if (with_grid_memory) os << ",peak_grid_doubles";
    os << "\n";
    for (const auto& row : out.step_diagnostics) {
        os << row.step << "," << format17(row.time);
        for (int i = 0; i < d; ++i) os << "," << format17(row.grid_mean[i]);
        for (int i = 0; i < d; ++i) os << "," << format17(row.grid_cov_eigenvalues[i]);
        os << "," << format17(row.drift_residual) << "," << format17(row.zero_drift_residual)
           << "," << format17(row.value_residual) << "," << format17(row.design_condition) << ","
           << (row.projection_applied ? 1 : 0) << "," << (row.covariance_regularized ? 1 : 0);
        if (with_grid_memory) os << "," << out.peak_particle_doubles;
        os << "\n";
    }
}

std::vector<std::string> write_models(const std::string& out_dir, const std::string& scheme,
                                      const SolverOutput& out, int steps) {
    std::vector<std::string> files;
    const std::string rel_dir = "models_" + scheme;
    fs::create_directories(out_dir + "/" + rel_dir);
    char name[64];
    for (int k = 0; k < steps; ++k) {
        std::snprintf(name, sizeof(name), "%s/v_%03d.txt", rel_dir.c_str(), k);
        save_model(out.values[k], out_dir + "/" + name);
        files.emplace_back(name);
    }
    // The terminal value is the exact terminal cost, stored symbolically.
    std::snprintf(name, sizeof(name), "%s/v_%03d.txt", rel_dir.c_str(), steps);
    {
        std::ofstream os(out_dir + "/" + name, std::ios::binary);
        os << "terminal\n";
    }
    files.emplace_back(name);
    return files;
}

std::vector<std::string> write_tcl_inputs(const std::string& out_dir, const ProblemBundle& bundle,
                                          double horizon) {
    tcl::write_profile_csv(out_dir + "/r_nom.csv", bundle.r_nom, horizon);
    tcl::write_profile_csv(out_dir + "/r.csv", bundle.r, horizon);
    tcl::write_population(out_dir + "/population.txt", *bundle.population);
    return {"r_nom.csv", "r.csv", "population.txt"};
}

int cmd_solve(const CommonOptions& opts) {
    ExperimentConfig cfg = load_config(opts);
    const int d = cfg.dims.front();
    const int particles = cfg.particle_counts.front();
    fs::create_directories(opts.out_dir);
    ProblemBundle bundle = make_problem_bundle(cfg, d);

    std::vector<std::string> files;
    if (cfg.family == "tcl") {
        auto inputs = write_tcl_inputs(opts.out_dir, bundle, cfg.horizon);
        files.insert(files.end(), inputs.begin(), inputs.end());
    }
    if (cfg.run_backward()) {
        SolverConfig sc = backward_config_for(cfg, bundle, particles,
                                              replicate_seed(cfg.grid_seed, 0, 0));
        SolverOutput out = solve_backward(bundle.problem, sc);
        auto models = write_models(opts.out_dir, "backward", out, cfg.steps);
        files.insert(files.end(), models.begin(), models.end());
        write_diagnostics_csv(opts.out_dir + "/diagnostics_backward.csv", out, d, false);
        files.emplace_back("diagnostics_backward.csv");
    }
    if (cfg.run_forward()) {
        ForwardConfig fc = forward_config_for(cfg, bundle, particles,
                                              replicate_seed(cfg.grid_seed, 0, 1));
        SolverOutput out = solve_forward(bundle.problem, fc);
        auto models = write_models(opts.out_dir, "forward", out, cfg.steps);
        files.insert(files.end(), models.begin(), models.end());
        write_diagnostics_csv(opts.out_dir + "/diagnostics_forward.csv", out, d, true);
        files.emplace_back("diagnostics_forward.csv");
    }
    write_manifest(opts.out_dir, cfg.raw, files);
    std::cout << "solve: wrote " << files.size() << " files to " << opts.out_dir << "\n";
    return 0;
}

int cmd_profile(const CommonOptions& opts) {
    ExperimentConfig cfg = load_config(opts);
    if (cfg.family != "tcl") {
        throw ConfigError("profile: only the tcl family has consumption profiles");
    }
    const int d = cfg.dims.front();
    fs::create_directories(opts.out_dir);
    ProblemBundle bundle = make_problem_bundle(cfg, d);
    auto files = write_tcl_inputs(opts.out_dir, bundle, cfg.horizon);
    write_manifest(opts.out_dir, cfg.raw, files);
    std::cout << "profile: wrote " << files.size() << " files to " << opts.out_dir << "\n";
    return 0;
}

int cmd_evaluate(const CommonOptions& opts, const std::string& models_dir_flag) {
    ExperimentConfig cfg = load_config(opts);
    const int d = cfg.dims.front();
    const int particles = cfg.particle_counts.front();
    const std::string models_root = models_dir_flag.empty() ? opts.out_dir : models_dir_flag;
    fs::create_directories(opts.out_dir);
    ProblemBundle bundle = make_problem_bundle(cfg, d);

    std::ofstream os(opts.out_dir + "/evaluation.csv", std::ios::binary);
    os << "scheme,d,N,J_hat,sigma_hat\n";
    for (const std::string& scheme : {std::string("backward"), std::string("forward")}) {
        if ((scheme == "backward" && !cfg.run_backward()) ||
            (scheme == "forward" && !cfg.run_forward())) {
            continue;
        }
        std::vector<PolynomialModel> values(cfg.steps);
        for (int k = 0; k < cfg.steps; ++k) {
            char name[64];
            std::snprintf(name, sizeof(name), "/models_%s/v_%03d.txt", scheme.c_str(), k);
            values[k] = load_model(models_root + name);
            if (values[k].dim != d) {
                throw Error(ErrorKind::InvalidInput, "evaluate: model dimension mismatch in " +
                                                         scheme + " at step " + std::to_string(k));
            }
        }
        const std::vector<double> costs = rollout_policy(bundle.problem, values, bundle.x0,
                                                         cfg.eval_paths, cfg.eval_seed,
                                                         cfg.threads);
        double mean = 0.0;
        for (double c : costs) mean += c;
        mean /= costs.size();
        double var = 0.0;
        for (double c : costs) var += (c - mean) * (c - mean);
        var /= (costs.size() - 1);
        const double sem = std::sqrt(var / costs.size());
        os << scheme << "," << d << "," << particles << "," << format17(mean) << ","
           << format17(sem) << "\n";
    }
    os.close();
    write_manifest(opts.out_dir, cfg.raw, {"evaluation.csv"});
    std::cout << "evaluate: wrote evaluation.csv to " << opts.out_dir << "\n";
    return 0;
}

int cmd_compare(const CommonOptions& opts) {
    ExperimentConfig cfg = load_config(opts);
    fs::create_directories(opts.out_dir);

    std::ofstream os(opts.out_dir + "/compare.csv", std::ios::binary);
    os << "scheme,d,N,J_hat,sigma_hat,wall_time,peak_particle_memory\n";
    for (int d : cfg.dims) {
        ProblemBundle bundle = make_problem_bundle(cfg, d);
        for (int particles : cfg.particle_counts) {
            for (const std::string& scheme : {std::string("backward"), std::string("forward")}) {
                if ((scheme == "backward" && !cfg.run_backward()) ||
                    (scheme == "forward" && !cfg.run_forward())) {
                    continue;
                }
                const SweepRow row = run_sweep_cell(cfg, bundle, scheme, d, particles);
                os << row.scheme << "," << row.d << "," << row.particles << ","
                   << format17(row.j_hat) << "," << format17(row.sigma_hat) << ","
                   << format17(row.wall_seconds) << "," << row.peak_particle_doubles << "\n";
                os.flush();
                std::cout << "compare: " << row.scheme << " d=" << row.d << " N=" << row.particles
                          << " J_hat=" << row.j_hat << " sigma_hat=" << row.sigma_hat << "\n";
            }
        }
    }
    os.close();
    write_manifest(opts.out_dir, cfg.raw, {"compare.csv"});
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    std::setlocale(LC_ALL, "C");
    CLI::App app{"Backward-grid regression Monte-Carlo solver for stochastic control"};
    app.require_subcommand(1);

    CommonOptions solve_opts, profile_opts, eval_opts, compare_opts;
    std::string models_dir;

    CLI::App* solve = app.add_subcommand("solve", "solve the configured problem, save value models");
    add_common(solve, solve_opts);
    CLI::App* profile = app.add_subcommand("profile", "generate nominal and target profiles");
    add_common(profile, profile_opts);
    CLI::App* evaluate = app.add_subcommand("evaluate", "roll out saved value models");
    add_common(evaluate, eval_opts);
    evaluate->add_option("--models", models_dir, "directory holding models_<scheme>/ (default: --out)");
    CLI::App* compare = app.add_subcommand("compare", "sweep (d, N) and compare schemes");
    add_common(compare, compare_opts);

    try {
        app.parse(argc, argv);
        if (solve->parsed()) return cmd_solve(solve_opts);
        if (profile->parsed()) return cmd_profile(profile_opts);
        if (evaluate->parsed()) return cmd_evaluate(eval_opts, models_dir);
        if (compare->parsed()) return cmd_compare(compare_opts);
        return 2;
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
