#include "revgrid/backward_solver.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <limits>

#include "revgrid/gaussian_flow.hpp"
#include "revgrid/linalg.hpp"
#include "revgrid/rng.hpp"
#include "revgrid/util.hpp"

namespace revgrid {

namespace {

int action_dim(const ControlProblem& problem) {
    if (const auto* box = std::get_if<BoxSet>(&problem.actions)) {
        return static_cast<int>(box->lower.size());
    }
    const auto& finite = std::get<FiniteSet>(problem.actions);
    if (finite.actions.empty()) {
        throw Error(ErrorKind::InvalidInput, "control problem has an empty action set");
    }
    return static_cast<int>(finite.actions.front().size());
}

void validate(const ControlProblem& problem, const SolverConfig& config) {
    if (config.steps < 1) throw Error(ErrorKind::InvalidInput, "solver: steps must be >= 1");
    if (problem.horizon <= 0.0) throw Error(ErrorKind::InvalidInput, "solver: horizon must be > 0");
    if (config.terminal_mean.size() != problem.dim ||
        config.terminal_cov.rows() != problem.dim || config.terminal_cov.cols() != problem.dim) {
        throw Error(ErrorKind::InvalidInput, "solver: terminal grid dimensions do not match problem");
    }
    const int b = basis_size(problem.dim, config.degree);
    if (config.particles < b) {
        throw Error(ErrorKind::UnderDetermined,
                    "solver: under-determined regression, N=" + std::to_string(config.particles) +
                        " < basis size " + std::to_string(b));
    }
    if (!check_admissible(config.terminal_cov)) {
        throw Error(ErrorKind::InvalidState, "solver: terminal covariance is not PSD");
    }
    if (config.frozen_drift &&
        (config.frozen_drift->a.rows() != problem.dim || config.frozen_drift->c.size() != problem.dim)) {
        throw Error(ErrorKind::InvalidInput, "solver: frozen drift dimension mismatch");
    }
}

Vector sorted_eigenvalues(const Matrix& q) {
    Eigen::SelfAdjointEigenSolver<Matrix> eig(symmetrize(q), Eigen::EigenvaluesOnly);
    return eig.eigenvalues();
}

}  // namespace

SolverOutput solve_backward(const ControlProblem& problem, const SolverConfig& config) {
    validate(problem, config);

    const int n = config.steps;
    const int count = config.particles;
    const int d = problem.dim;
    const int ka = action_dim(problem);
    const double dt = problem.horizon / n;
    const double sqrt_dt = std::sqrt(dt);
    const int threads = std::max(1, config.threads);
    const int basis = basis_size(d, config.degree);

    SolverOutput out;
    out.values.resize(n);
    out.drifts.resize(n);
    out.grid_law.resize(n + 1);
    if (config.collect_diagnostics) out.step_diagnostics.resize(n);

    MemoryMeter meter;
    Matrix states(d, count);        // xi_{k+1}
    Matrix next_states(d, count);   // xi_k
    Matrix gradients(d, count);     // grad v_{k+1}(xi_{k+1})
    Matrix drift_values(d, count);  // b(t_{k+1}, xi_{k+1}, alpha_{k+1})
    Matrix actions(ka, count);
    Matrix correction(d, count);  // b_c values
    Matrix noise(d, count);
    Vector carried(count);  // Y
    Vector targets(count);
    meter.add(static_cast<std::size_t>(count) * (6 * d + ka) + 2 * static_cast<std::size_t>(count));

    // Terminal grid.
    Vector mean_next = config.terminal_mean;
    Matrix cov_next = symmetrize(config.terminal_cov);
    {
        const Matrix factor = covariance_factor(cov_next);
        parallel_for(count, threads, [&](int i) {
            RngStream rng(config.seed, StreamTag::TerminalGrid, static_cast<std::uint64_t>(n),
                          static_cast<std::uint64_t>(i));
            states.col(i) = mean_next + factor * rng.normal_vector(d);
            carried[i] = problem.terminal_cost(states.col(i));
        });
    }
    out.grid_law[n] = {mean_next, cov_next};

    auto value_at = [&](int level, const Vector& x) {
        return level == n ? problem.terminal_cost(x) : out.values[level].value(x);
    };
    auto gradient_at = [&](int level, const Vector& x) {
        return level == n ? problem.terminal_cost_gradient(x) : out.values[level].gradient(x);
    };

    for (int k = n - 1; k >= 0; --k) {
        Stopwatch watch;
        const double t1 = (k + 1) * dt;
        const Matrix sigma1 = problem.sigma(t1);
        if (!sigma1.allFinite()) {
            throw Error(ErrorKind::InvalidInput, "solver: non-finite volatility at step " +
                                                     std::to_string(k));
        }
        const Matrix sigma_sq = symmetrize(sigma1 * sigma1.transpose());

        AffineDrift drift;
        auto run_steps_1_2 = [&] {
            parallel_for(count, threads, [&](int i) {
                gradients.col(i) = gradient_at(k + 1, states.col(i));
                actions.col(i) = hamiltonian_argmin(problem, t1, states.col(i), gradients.col(i));
                drift_values.col(i) = problem.drift(t1, states.col(i), actions.col(i));
            });
            drift = config.frozen_drift ? *config.frozen_drift
                                        : fit_affine_drift(states, drift_values);
        };
        run_steps_1_2();

        Vector mean_k = backward_mean_step(mean_next, drift, dt);
        Matrix cov_candidate = backward_cov_step(cov_next, drift, sigma_sq, dt);
        bool projected = false;
        Matrix cov_k;
        if (check_admissible(cov_candidate)) {
            cov_k = cov_candidate;
        } else {
            // Projection fallback: put the grid covariance back on the PSD
            // cone, reconcile Q_{k+1}, regenerate the step-(k+1) ensemble and
            // redo Steps 1-2 on the fresh particles.
            projected = true;
            cov_k = project_psd(cov_candidate);
            const Matrix grow = matrix_exp(drift.a, dt);
            cov_next = symmetrize(grow * (cov_k + sigma_sq * dt) * grow.transpose());
            out.grid_law[k + 1].cov = cov_next;
            const Matrix factor = covariance_factor(cov_next);
            parallel_for(count, threads, [&](int i) {
                RngStream rng(config.seed, StreamTag::Regen, static_cast<std::uint64_t>(k),
                              static_cast<std::uint64_t>(i));
                states.col(i) = mean_next + factor * rng.normal_vector(d);
                carried[i] = value_at(k + 1, states.col(i));
            });
            run_steps_1_2();
        }

        // Step 5: drift-fit residuals.
        Matrix instrumental = drift.a * states;
        instrumental.colwise() += drift.c;
        const Matrix residual = instrumental - drift_values;

        // Step 6: reversed SDE step. b_c(t, x, m, Q) = Sigma(t) Q^{-1} (x - m).
        bool regularized = false;
        {
            Matrix bc_matrix = cov_next;
            const Vector eigs = sorted_eigenvalues(cov_next);
            const double lam_min = eigs[0];
            const double lam_max = eigs[eigs.size() - 1];
            const double cond = lam_min > 0.0 ? lam_max / lam_min
                                              : std::numeric_limits<double>::infinity();
            if (!(lam_min > 0.0) || cond > 1e14) {
                const double tr = cov_next.trace();
                if (!(tr > 0.0)) {
                    throw Error(ErrorKind::Numerical,
                                "solver: near-singular grid covariance at step " +
                                    std::to_string(k + 1));
                }
                bc_matrix += 1e-12 * tr * Matrix::Identity(d, d);
                regularized = true;
            }
            Eigen::LDLT<Matrix> ldlt(bc_matrix);
            if (ldlt.info() != Eigen::Success) {
                throw Error(ErrorKind::Numerical,
                            "solver: covariance factorization failed at step " +
                                std::to_string(k + 1));
            }
            Matrix centered = states;
            centered.colwise() -= mean_next;
            correction = sigma_sq * ldlt.solve(centered);
        }
        parallel_for(count, threads, [&](int i) {
            RngStream rng(config.seed, StreamTag::StepNoise, static_cast<std::uint64_t>(k),
                          static_cast<std::uint64_t>(i));
            noise.col(i) = rng.normal_vector(d);
        });
        next_states = states - (instrumental + correction) * dt + sigma1 * noise * sqrt_dt;

        // Steps 7-8: multi-step forward DP targets and value regression.
        parallel_for(count, threads, [&](int i) {
            targets[i] = carried[i] +
                         (problem.running_cost(t1, states.col(i), actions.col(i)) -
                          residual.col(i).dot(gradients.col(i))) *
                             dt;
        });
        FitDiagnostics fit_diag;
        meter.add(static_cast<std::size_t>(count) * basis);
        out.values[k] = fit_value(next_states, targets, config.degree, &fit_diag);
        meter.sub(static_cast<std::size_t>(count) * basis);
        carried = targets;

        out.drifts[k] = drift;
        out.grid_law[k] = {mean_k, cov_k};
        if (config.collect_diagnostics) {
            StepDiagnostics& diag = out.step_diagnostics[k];
            diag.step = k;
            diag.time = k * dt;
            diag.grid_mean = mean_k;
            diag.grid_cov_eigenvalues = sorted_eigenvalues(cov_k);
            diag.drift_residual = residual.colwise().squaredNorm().mean();
            diag.zero_drift_residual = drift_values.colwise().squaredNorm().mean();
            diag.value_residual = fit_diag.mean_square_residual;
            diag.design_condition = fit_diag.design_condition;
            diag.projection_applied = projected;
            diag.covariance_regularized = regularized;
            diag.wall_seconds = watch.seconds();
        }

        states.swap(next_states);
        mean_next = std::move(mean_k);
        cov_next = std::move(cov_k);
    }

    out.peak_particle_doubles = meter.peak();
    return out;
}

}  // namespace revgrid
