#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "revgrid/problem.hpp"
#include "revgrid/regression.hpp"
#include "revgrid/types.hpp"

namespace revgrid {

struct SolverConfig {
    int steps = 0;      // n: time-grid steps
    int particles = 0;  // N: regression sample size
    int degree = 2;     // p: polynomial degree of the value basis
    std::uint64_t seed = 0;
    Vector terminal_mean;  // grid initialization mean
    Matrix terminal_cov;   // grid initialization covariance, PSD
    bool collect_diagnostics = true;
    // When set, the adaptive drift fit is disabled and this (a, c) is used at
    // every step. Validation hook for the time-reversal law tests.
    std::optional<AffineDrift> frozen_drift;
    int threads = 1;
};

struct StepDiagnostics {
    int step = 0;
    double time = 0.0;
    Vector grid_mean;
    Vector grid_cov_eigenvalues;
    double drift_residual = 0.0;       // (1/N) sum |a x_i + c - b_i|^2 after the drift fit
    double zero_drift_residual = 0.0;  // same residual for the frozen candidate (a, c) = (0, 0)
    double value_residual = 0.0;       // mean-square residual of the value regression
    double design_condition = 0.0;
    bool projection_applied = false;
    bool covariance_regularized = false;
    double wall_seconds = 0.0;
};

struct SolverOutput {
    // values[k] approximates the value function at t_k for k = 0..n-1; the
    // terminal value is the exact terminal cost and is not fitted.
    std::vector<PolynomialModel> values;
    // drifts[k] holds the step drift (a_{k+1}, c_{k+1}). Empty for solvers
    // without an instrumental drift.
    std::vector<AffineDrift> drifts;
    // grid_law[k] is the grid Gaussian (m_k, Q_k) for k = 0..n (backward
    // solver) or empty when not applicable.
    std::vector<GaussianState> grid_law;
    std::vector<StepDiagnostics> step_diagnostics;
    std::size_t peak_particle_doubles = 0;
};

/// Fully backward Monte-Carlo regression scheme: the regression grid is
/// simulated backward in time as the time-reversal of an adaptively refitted
/// Ornstein-Uhlenbeck diffusion, while the value function is regressed with
/// multi-step forward dynamic-programming targets. Only the current step's
/// particle ensemble is retained.
SolverOutput solve_backward(const ControlProblem& problem, const SolverConfig& config);

}  // namespace revgrid
