#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "revgrid/problem.hpp"
#include "revgrid/rng.hpp"
#include "revgrid/types.hpp"

namespace revgrid::tcl {

/// Per-cluster physical and cost parameters of the thermostatic-load
/// benchmark. Temperatures in degrees C; one time unit is one control step
/// (60 s of wall time), rates are per time unit.
struct ClusterParams {
    Vector theta;       // inverse thermal time constant
    Vector kappa;       // heat-exchange parameter, degC/J
    Vector p_max;       // maximal power draw
    Vector sigma_load;  // per-load temperature volatility
    Vector x_out;       // outdoor temperature
    Vector x_target;    // target mean temperature (also the initial state)
    Vector x_min;       // comfort band lower edge
    Vector x_max;       // comfort band upper edge
    Vector gamma;       // consumption smoothness penalty
    Vector eta;         // comfort excursion penalty
    Vector rho;         // power share, sums to 1
    Eigen::VectorXi loads;  // loads per cluster
    double lambda = 0.0;    // tracking penalty

    int dim() const { return static_cast<int>(theta.size()); }
};

/// Sampling intervals and fixed constants for heterogeneous populations.
struct ParamRanges {
    double theta_min = 0.1, theta_max = 0.97;
    double pmax_min = 0.5, pmax_max = 5.0;
    double xbar_min = 16.0, xbar_max = 27.0;
    double gamma_min = 0.5, gamma_max = 1.5;
    double kappa = 2.5;
    double sigma_load = 0.1;
    double x_out = 27.0;
    double eta = 1.0;
    double lambda = 20.0;
    double comfort_halfwidth = 1.5;
    int loads_per_cluster = 20;
    double horizon = 60.0;
    int steps = 60;
};

/// Draw a heterogeneous population: ranged parameters i.i.d. uniform on
/// their interval (in the order theta, p_max, x_target, gamma per cluster),
/// the rest fixed from the ranges.
ClusterParams sample_population(const ParamRanges& ranges, int d, RngStream& rng);

struct LoadParams {
    double theta = 0.0;
    double kappa = 0.0;
    double p_max = 0.0;
    double sigma = 0.0;
    double x_out = 0.0;
    double x_min = 0.0;
    double x_max = 0.0;
};

struct LoadTrace {
    Vector temperature;       // steps + 1 grid instants
    std::vector<int> status;  // 1 = ON
    Vector consumption;       // status * p_max
};

/// Micro-simulation of one load under the ON/OFF cycling rule: ON until the
/// temperature reaches x_min, then OFF until it reaches x_max. Switches are
/// evaluated at grid instants; the temperature follows an Euler step.
LoadTrace simulate_individual_cycle(const LoadParams& params, double x0, int alpha0, int steps,
                                    double dt, RngStream& rng);

/// Nominal consumption profile: the consumption fraction of
/// `population_draws` independently drawn populations following the cycling
/// rule, averaged. Initial temperatures are N(x_target, 1), initial statuses
/// fair coin flips. Length steps + 1, values in [0, 1].
Vector nominal_profile(const ParamRanges& ranges, int d, int population_draws, std::uint64_t seed,
                       int threads = 1);

/// Target profile r = r_nom + amplitude * sin(2 pi t / horizon) on the grid.
Vector target_profile(const Vector& r_nom, double amplitude, double horizon);

/// Stationary duty cycle clip(theta (x_out - x_target) / (kappa p_max), 0, 1)
/// per cluster; the nominal control of the forward baseline.
Vector duty_cycle(const ClusterParams& params);

/// Box-constrained QP behind the Hamiltonian argmin: minimize over
/// a in [0,1]^d
///   lambda (rho . a - target)^2 + (1/d) sum_i gamma_i (rho_i a_i)^2
///     - sum_i kappa_i p_max_i a_i delta_i
/// by cyclic coordinate descent with exact scalar minimization.
Vector qp_argmin(const ClusterParams& params, double target, const Vector& delta);

/// The aggregated central-controller problem on [0, horizon] with the target
/// profile sampled on an (n+1)-point grid (nearest grid value off-grid).
ControlProblem build_control_problem(const ClusterParams& params, const Vector& target_profile,
                                     double horizon);

/// Two-column CSV (t_k, value).
void write_profile_csv(const std::string& path, const Vector& profile, double horizon);

/// Structured text dump of a sampled population for audit.
void write_population(const std::string& path, const ClusterParams& params);

}  // namespace revgrid::tcl
