#include "revgrid/forward_solver.hpp"

#include <cmath>

#include "revgrid/linalg.hpp"
#include "revgrid/rng.hpp"
#include "revgrid/util.hpp"

namespace revgrid {

namespace {

int action_dim(const ControlProblem& problem) {
    if (const auto* box = std::get_if<BoxSet>(&problem.actions)) {
        return static_cast<int>(box->lower.size());
    }
    return static_cast<int>(std::get<FiniteSet>(problem.actions).actions.front().size());
}

GaussianState empirical_state(const Matrix& samples) {
    const int count = static_cast<int>(samples.cols());
    GaussianState s;
    s.mean = samples.rowwise().mean();
    Matrix centered = samples;
    centered.colwise() -= s.mean;
    s.cov = symmetrize(centered * centered.transpose() / std::max(count - 1, 1));
    return s;
}

}  // namespace

SolverOutput solve_forward(const ControlProblem& problem, const ForwardConfig& config) {
    if (config.steps < 1) throw Error(ErrorKind::InvalidInput, "forward solver: steps must be >= 1");
    if (config.initial_state.size() != problem.dim) {
        throw Error(ErrorKind::InvalidInput, "forward solver: initial state dimension mismatch");
    }
    if (!config.nominal_control) {
        throw Error(ErrorKind::InvalidInput, "forward solver: nominal control is required");
    }
    const int basis = basis_size(problem.dim, config.degree);
    if (config.particles < basis) {
        throw Error(ErrorKind::UnderDetermined,
                    "forward solver: under-determined regression, N=" +
                        std::to_string(config.particles) + " < basis size " + std::to_string(basis));
    }

    const int n = config.steps;
    const int count = config.particles;
    const int d = problem.dim;
    const int ka = action_dim(problem);
    const double dt = problem.horizon / n;
    const double sqrt_dt = std::sqrt(dt);
    const int threads = std::max(1, config.threads);

    SolverOutput out;
    out.values.resize(n);
    out.grid_law.resize(n + 1);
    if (config.collect_diagnostics) out.step_diagnostics.resize(n);

    MemoryMeter meter;

    // Forward grid under the nominal control; the entire grid is retained.
    std::vector<Matrix> grid(n + 1);
    for (auto& g : grid) {
        g.resize(d, count);
        meter.add(static_cast<std::size_t>(d) * count);
    }
    grid[0].colwise() = config.initial_state;
    for (int k = 0; k < n; ++k) {
        const double tk = k * dt;
        const Vector nominal = config.nominal_control(tk);
        const Matrix sigma_k = problem.sigma(tk);
        parallel_for(count, threads, [&](int i) {
            RngStream rng(config.seed, StreamTag::ForwardGrid, static_cast<std::uint64_t>(k),
                          static_cast<std::uint64_t>(i));
            grid[k + 1].col(i) = grid[k].col(i) +
                                 problem.drift(tk, grid[k].col(i), nominal) * dt +
                                 sigma_k * rng.normal_vector(d) * sqrt_dt;
        });
        out.grid_law[k] = empirical_state(grid[k]);
    }
    out.grid_law[n] = empirical_state(grid[n]);

    Matrix gradients(d, count);
    Matrix actions(ka, count);
    Vector carried(count);
    Vector targets(count);
    meter.add(static_cast<std::size_t>(count) * (d + ka) + 2 * static_cast<std::size_t>(count));

    parallel_for(count, threads, [&](int i) { carried[i] = problem.terminal_cost(grid[n].col(i)); });

    for (int k = n - 1; k >= 0; --k) {
        Stopwatch watch;
        const double t1 = (k + 1) * dt;
        const Vector nominal = config.nominal_control(t1);
        double drift_gap_accum = 0.0;
        double drift_norm_accum = 0.0;

        parallel_for(count, threads, [&](int i) {
            const Vector x = grid[k + 1].col(i);
            gradients.col(i) =
                k + 1 == n ? problem.terminal_cost_gradient(x) : out.values[k + 1].gradient(x);
            actions.col(i) = hamiltonian_argmin(problem, t1, x, gradients.col(i));
            const Vector controlled = problem.drift(t1, x, actions.col(i));
            const Vector instrumental = problem.drift(t1, x, nominal);
            targets[i] = carried[i] + (problem.running_cost(t1, x, actions.col(i)) +
                                       (controlled - instrumental).dot(gradients.col(i))) *
                                          dt;
        });
        // Residual bookkeeping mirrors the backward diagnostics.
        for (int i = 0; i < count; ++i) {
            const Vector x = grid[k + 1].col(i);
            const Vector controlled = problem.drift(t1, x, actions.col(i));
            drift_gap_accum += (controlled - problem.drift(t1, x, nominal)).squaredNorm();
            drift_norm_accum += controlled.squaredNorm();
        }

        FitDiagnostics fit_diag;
        meter.add(static_cast<std::size_t>(count) * basis);
        out.values[k] = fit_value(grid[k], targets, config.degree, &fit_diag);
        meter.sub(static_cast<std::size_t>(count) * basis);
        carried = targets;

        if (config.collect_diagnostics) {
            StepDiagnostics& diag = out.step_diagnostics[k];
            diag.step = k;
            diag.time = k * dt;
            diag.grid_mean = out.grid_law[k].mean;
            Eigen::SelfAdjointEigenSolver<Matrix> eig(out.grid_law[k].cov, Eigen::EigenvaluesOnly);
            diag.grid_cov_eigenvalues = eig.eigenvalues();
            diag.drift_residual = drift_gap_accum / count;
            diag.zero_drift_residual = drift_norm_accum / count;
            diag.value_residual = fit_diag.mean_square_residual;
            diag.design_condition = fit_diag.design_condition;
            diag.wall_seconds = watch.seconds();
        }
    }

    out.peak_particle_doubles = meter.peak();
    return out;
}

}  // namespace revgrid
