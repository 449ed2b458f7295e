#include "revgrid/evaluation.hpp"

#include <cmath>

#include "revgrid/rng.hpp"
#include "revgrid/util.hpp"

namespace revgrid {

std::vector<double> rollout_policy(const ControlProblem& problem,
                                   const std::vector<PolynomialModel>& values, const Vector& x0,
                                   int paths, std::uint64_t eval_seed, int threads) {
    if (values.empty()) {
        throw Error(ErrorKind::InvalidInput, "rollout_policy: no value models");
    }
    if (x0.size() != problem.dim) {
        throw Error(ErrorKind::InvalidInput, "rollout_policy: initial state dimension mismatch");
    }
    const int n = static_cast<int>(values.size());
    const double dt = problem.horizon / n;
    const double sqrt_dt = std::sqrt(dt);

    std::vector<double> costs(paths);
    parallel_for(paths, std::max(1, threads), [&](int j) {
        Vector x = x0;
        double cost = 0.0;
        for (int k = 0; k < n; ++k) {
            const double tk = k * dt;
            const Vector delta = values[k].gradient(x);
            const Vector action = hamiltonian_argmin(problem, tk, x, delta);
            cost += problem.running_cost(tk, x, action) * dt;
            RngStream rng(eval_seed, StreamTag::Evaluation, static_cast<std::uint64_t>(k),
                          static_cast<std::uint64_t>(j));
            x += problem.drift(tk, x, action) * dt +
                 problem.sigma(tk) * rng.normal_vector(problem.dim) * sqrt_dt;
        }
        costs[j] = cost + problem.terminal_cost(x);
    });
    return costs;
}

JEstimate estimate_J(const Eigen::Ref<const Matrix>& costs) {
    const int grids = static_cast<int>(costs.rows());
    const int paths = static_cast<int>(costs.cols());
    if (grids < 2 || paths < 2) {
        throw Error(ErrorKind::InvalidInput,
                    "estimate_J: need at least 2 replicates and 2 paths, got " +
                        std::to_string(grids) + "x" + std::to_string(paths));
    }
    JEstimate est;
    est.j_hat = costs.mean();

    const Vector row_means = costs.rowwise().mean();
    double within = 0.0;
    for (int i = 0; i < grids; ++i) {
        within += (costs.row(i).array() - row_means[i]).square().sum() / (paths - 1);
    }
    within /= grids;
    const double between =
        (row_means.array() - row_means.mean()).square().sum() / (grids - 1);

    est.sigma_hat = std::sqrt(within / (static_cast<double>(paths) * grids) + between / grids);
    return est;
}

}  // namespace revgrid
