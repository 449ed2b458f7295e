#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "revgrid/problem.hpp"
#include "revgrid/regression.hpp"

namespace revgrid {

/// Simulate M policy rollouts from x0 under the feedback
/// alpha_k(x) = hamiltonian_argmin(t_k, x, grad v_k(x)) and return the
/// realized costs g(X_T) + sum_k f(t_k, X_k, alpha_k) dt. Noise streams are
/// keyed by (eval_seed, step, path) only, so the same path set is reused
/// across solver replicates (common random numbers).
std::vector<double> rollout_policy(const ControlProblem& problem,
                                   const std::vector<PolynomialModel>& values, const Vector& x0,
                                   int paths, std::uint64_t eval_seed, int threads = 1);

struct JEstimate {
    double j_hat = 0.0;
    double sigma_hat = 0.0;
};

/// Grand-mean cost estimate over a (replicates x paths) cost matrix with the
/// two-term variance decomposition
///   Var = (1/(M G)) E[Var(J | grid)] + (1/G) Var(E[J | grid]),
/// sample variances with divisors M-1 (within rows) and G-1 (between row
/// means). Requires at least 2 rows and 2 columns.
JEstimate estimate_J(const Eigen::Ref<const Matrix>& costs);

struct EvaluationReport {
    double j_hat = 0.0;
    double sigma_hat = 0.0;
    Matrix costs;  // replicates x paths
    int dim = 0;
    int particles = 0;
    std::uint64_t eval_seed = 0;
};

}  // namespace revgrid
