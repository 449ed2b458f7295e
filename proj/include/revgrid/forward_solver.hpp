#pragma once

#include <cstdint>
#include <functional>

#include "revgrid/backward_solver.hpp"
#include "revgrid/problem.hpp"

namespace revgrid {

struct ForwardConfig {
    int steps = 0;
    int particles = 0;
    int degree = 2;
    std::uint64_t seed = 0;
    Vector initial_state;
    std::function<Vector(double)> nominal_control;  // deterministic, A-valued
    bool collect_diagnostics = true;
    int threads = 1;
};

/// Classical regression baseline on a forward grid: the grid is simulated
/// forward from the initial state under the nominal control (the whole
/// n x N grid is stored), then the value function is regressed backward with
/// the same multi-step forward-DP driver as the backward scheme, the nominal
/// drift playing the instrumental role. grid_law holds the empirical
/// (mean, covariance) of the grid at each instant.
SolverOutput solve_forward(const ControlProblem& problem, const ForwardConfig& config);

}  // namespace revgrid
