#pragma once

#include <optional>
#include <string>

#include "revgrid/backward_solver.hpp"
#include "revgrid/config.hpp"
#include "revgrid/evaluation.hpp"
#include "revgrid/forward_solver.hpp"

namespace revgrid {

/// Everything needed to run one experiment instance at a given dimension:
/// the control problem, the evaluation start point, the backward grid
/// initialization and the forward baseline's nominal control. For the tcl
/// family also the sampled population and the consumption profiles.
struct ProblemBundle {
    ControlProblem problem;
    Vector x0;
    Vector terminal_mean;
    Matrix terminal_cov;
    std::function<Vector(double)> nominal_control;
    std::optional<tcl::ClusterParams> population;
    Vector r_nom;  // empty unless family == tcl
    Vector r;
};

ProblemBundle make_problem_bundle(const ExperimentConfig& config, int d);

/// Independent solver seed for (replicate, scheme) derived from the base
/// grid seed.
std::uint64_t replicate_seed(std::uint64_t base, int replicate, int scheme_index);

struct SweepRow {
    std::string scheme;
    int d = 0;
    int particles = 0;
    double j_hat = 0.0;
    double sigma_hat = 0.0;
    double wall_seconds = 0.0;
    std::size_t peak_particle_doubles = 0;
};

/// One cell of the comparison protocol: solve `replicates` independent grids
/// with the requested scheme, roll each out on the shared evaluation paths,
/// and report the two-term estimate of the expected cost.
SweepRow run_sweep_cell(const ExperimentConfig& config, const ProblemBundle& bundle,
                        const std::string& scheme, int d, int particles);

SolverConfig backward_config_for(const ExperimentConfig& config, const ProblemBundle& bundle,
                                 int particles, std::uint64_t seed);
ForwardConfig forward_config_for(const ExperimentConfig& config, const ProblemBundle& bundle,
                                 int particles, std::uint64_t seed);

}  // namespace revgrid
