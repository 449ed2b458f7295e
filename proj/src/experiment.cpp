#include "revgrid/experiment.hpp"

#include "revgrid/util.hpp"

namespace revgrid {

ProblemBundle make_problem_bundle(const ExperimentConfig& config, int d) {
    ProblemBundle bundle;
    if (config.family == "lqr") {
        bundle.problem = lqr_problem_1d(config.horizon, config.lqr.action_bound, config.lqr.sigma);
        bundle.x0 = Vector::Constant(1, config.lqr.x0);
        bundle.terminal_mean = Vector::Constant(1, config.lqr.terminal_mean);
        bundle.terminal_cov = Matrix::Constant(1, 1, config.lqr.terminal_cov);
        bundle.nominal_control = [](double) { return Vector::Zero(1); };
        return bundle;
    }

    tcl::ParamRanges ranges = config.tcl_ranges;
    ranges.horizon = config.horizon;
    ranges.steps = config.steps;

    RngStream population_rng(config.population_seed, StreamTag::Population,
                             static_cast<std::uint64_t>(d), 0);
    bundle.population = tcl::sample_population(ranges, d, population_rng);

    const std::uint64_t profile_seed = RngStream::derive_key(
        config.population_seed, StreamTag::Profile, static_cast<std::uint64_t>(d), 0);
    bundle.r_nom = tcl::nominal_profile(ranges, d, config.population_draws, profile_seed,
                                        config.threads);
    bundle.r = tcl::target_profile(bundle.r_nom, config.deviation_amplitude, config.horizon);

    bundle.problem = tcl::build_control_problem(*bundle.population, bundle.r, config.horizon);
    bundle.x0 = bundle.population->x_target;
    bundle.terminal_mean = bundle.population->x_target;
    bundle.terminal_cov = Matrix::Identity(d, d);
    const Vector duty = tcl::duty_cycle(*bundle.population);
    bundle.nominal_control = [duty](double) { return duty; };
    return bundle;
}

std::uint64_t replicate_seed(std::uint64_t base, int replicate, int scheme_index) {
    return RngStream::derive_key(base, StreamTag::Replicate, static_cast<std::uint64_t>(replicate),
                                 static_cast<std::uint64_t>(scheme_index));
}

SolverConfig backward_config_for(const ExperimentConfig& config, const ProblemBundle& bundle,
                                 int particles, std::uint64_t seed) {
    SolverConfig sc;
    sc.steps = config.steps;
    sc.particles = particles;
    sc.degree = config.degree;
    sc.seed = seed;
    sc.terminal_mean = bundle.terminal_mean;
    sc.terminal_cov = bundle.terminal_cov;
    sc.threads = config.threads;
    return sc;
}

ForwardConfig forward_config_for(const ExperimentConfig& config, const ProblemBundle& bundle,
                                 int particles, std::uint64_t seed) {
    ForwardConfig fc;
    fc.steps = config.steps;
    fc.particles = particles;
    fc.degree = config.degree;
    fc.seed = seed;
    fc.initial_state = bundle.x0;
    fc.nominal_control = bundle.nominal_control;
    fc.threads = config.threads;
    return fc;
}

SweepRow run_sweep_cell(const ExperimentConfig& config, const ProblemBundle& bundle,
                        const std::string& scheme, int d, int particles) {
    const int scheme_index = scheme == "backward" ? 0 : 1;
    Stopwatch watch;
    Matrix costs(config.replicates, config.eval_paths);
    std::size_t peak = 0;
    for (int rep = 0; rep < config.replicates; ++rep) {
        const std::uint64_t seed = replicate_seed(config.grid_seed, rep, scheme_index);
        SolverOutput out;
        if (scheme == "backward") {
            SolverConfig sc = backward_config_for(config, bundle, particles, seed);
            sc.collect_diagnostics = false;
            out = solve_backward(bundle.problem, sc);
        } else {
            ForwardConfig fc = forward_config_for(config, bundle, particles, seed);
            fc.collect_diagnostics = false;
            out = solve_forward(bundle.problem, fc);
        }
        peak = std::max(peak, out.peak_particle_doubles);
        const std::vector<double> rollout =
            rollout_policy(bundle.problem, out.values, bundle.x0, config.eval_paths,
                           config.eval_seed, config.threads);
        for (int j = 0; j < config.eval_paths; ++j) costs(rep, j) = rollout[j];
    }
    const JEstimate est = estimate_J(costs);
    SweepRow row;
    row.scheme = scheme;
    row.d = d;
    row.particles = particles;
    row.j_hat = est.j_hat;
    row.sigma_hat = est.sigma_hat;
    row.wall_seconds = watch.seconds();
    row.peak_particle_doubles = peak;
    return row;
}

}  // namespace revgrid
