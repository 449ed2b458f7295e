#include "revgrid/tcl.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "revgrid/util.hpp"

namespace revgrid::tcl {

namespace {

double uniform_on(RngStream& rng, double lo, double hi) { return lo + (hi - lo) * rng.next_double(); }

double positive_part_sq(double v) { return v > 0.0 ? v * v : 0.0; }

}  // namespace

ClusterParams sample_population(const ParamRanges& ranges, int d, RngStream& rng) {
    if (d < 1) throw Error(ErrorKind::InvalidInput, "sample_population: d must be >= 1");
    ClusterParams p;
    p.theta.resize(d);
    p.kappa = Vector::Constant(d, ranges.kappa);
    p.p_max.resize(d);
    p.sigma_load = Vector::Constant(d, ranges.sigma_load);
    p.x_out = Vector::Constant(d, ranges.x_out);
    p.x_target.resize(d);
    p.gamma.resize(d);
    p.eta = Vector::Constant(d, ranges.eta);
    p.loads = Eigen::VectorXi::Constant(d, ranges.loads_per_cluster);
    p.lambda = ranges.lambda;
    for (int i = 0; i < d; ++i) {
        p.theta[i] = uniform_on(rng, ranges.theta_min, ranges.theta_max);
        p.p_max[i] = uniform_on(rng, ranges.pmax_min, ranges.pmax_max);
        p.x_target[i] = uniform_on(rng, ranges.xbar_min, ranges.xbar_max);
        p.gamma[i] = uniform_on(rng, ranges.gamma_min, ranges.gamma_max);
    }
    p.x_min = p.x_target.array() - ranges.comfort_halfwidth;
    p.x_max = p.x_target.array() + ranges.comfort_halfwidth;
    const Vector power = p.loads.cast<double>().cwiseProduct(p.p_max);
    p.rho = power / power.sum();
    return p;
}

LoadTrace simulate_individual_cycle(const LoadParams& params, double x0, int alpha0, int steps,
                                    double dt, RngStream& rng) {
    if (!std::isfinite(x0)) throw Error(ErrorKind::InvalidInput, "simulate_individual_cycle: x0");
    LoadTrace trace;
    trace.temperature.resize(steps + 1);
    trace.status.resize(steps + 1);
    trace.consumption.resize(steps + 1);
    double x = x0;
    int on = alpha0 != 0 ? 1 : 0;
    const double sqrt_dt = std::sqrt(dt);
    for (int k = 0; k <= steps; ++k) {
        if (on && x <= params.x_min) {
            on = 0;
        } else if (!on && x >= params.x_max) {
            on = 1;
        }
        trace.temperature[k] = x;
        trace.status[k] = on;
        trace.consumption[k] = on * params.p_max;
        if (k == steps) break;
        x += (-params.theta * (x - params.x_out) - params.kappa * params.p_max * on) * dt +
             params.sigma * sqrt_dt * rng.next_normal();
    }
    return trace;
}

Vector nominal_profile(const ParamRanges& ranges, int d, int population_draws, std::uint64_t seed,
                       int threads) {
    if (population_draws < 1) {
        throw Error(ErrorKind::InvalidInput, "nominal_profile: need at least one population draw");
    }
    const int n = ranges.steps;
    const double dt = ranges.horizon / n;
    Matrix fractions(n + 1, population_draws);
    parallel_for(population_draws, threads, [&](int p) {
        RngStream pop_rng(seed, StreamTag::Population, static_cast<std::uint64_t>(p), 0);
        const ClusterParams params = sample_population(ranges, d, pop_rng);
        Vector on_power = Vector::Zero(n + 1);
        double capacity = 0.0;
        for (int i = 0; i < d; ++i) {
            LoadParams lp{params.theta[i], params.kappa[i],  params.p_max[i], params.sigma_load[i],
                          params.x_out[i], params.x_min[i],  params.x_max[i]};
            capacity += params.loads[i] * params.p_max[i];
            for (int j = 0; j < params.loads[i]; ++j) {
                RngStream load_rng(seed, StreamTag::Profile, static_cast<std::uint64_t>(p),
                                   static_cast<std::uint64_t>(i) * 1000003ULL + j);
                const double x0 = params.x_target[i] + load_rng.next_normal();
                const int alpha0 = load_rng.next_double() < 0.5 ? 0 : 1;
                LoadTrace trace = simulate_individual_cycle(lp, x0, alpha0, n, dt, load_rng);
                on_power += trace.consumption;
            }
        }
        fractions.col(p) = on_power / capacity;
    });
    return fractions.rowwise().mean();
}

Vector target_profile(const Vector& r_nom, double amplitude, double horizon) {
    const int n = static_cast<int>(r_nom.size()) - 1;
    if (n < 1) throw Error(ErrorKind::InvalidInput, "target_profile: profile too short");
    Vector r(n + 1);
    for (int k = 0; k <= n; ++k) {
        const double t = horizon * k / n;
        r[k] = r_nom[k] + amplitude * std::sin(2.0 * M_PI * t / horizon);
    }
    return r;
}

Vector duty_cycle(const ClusterParams& params) {
    Vector duty(params.dim());
    for (int i = 0; i < params.dim(); ++i) {
        duty[i] = std::clamp(
            params.theta[i] * (params.x_out[i] - params.x_target[i]) /
                (params.kappa[i] * params.p_max[i]),
            0.0, 1.0);
    }
    return duty;
}

Vector qp_argmin(const ClusterParams& params, double target, const Vector& delta) {
    constexpr int kMaxSweeps = 10000;
    constexpr double kCoordinateTol = 1e-10;
    const int d = params.dim();
    if (delta.size() != d) throw Error(ErrorKind::InvalidInput, "qp_argmin: gradient dimension");

    const Vector linear = params.kappa.cwiseProduct(params.p_max).cwiseProduct(delta);
    auto objective = [&](const Vector& a) {
        const double track = params.rho.dot(a) - target;
        double v = params.lambda * track * track - linear.dot(a);
        for (int i = 0; i < d; ++i) {
            const double ra = params.rho[i] * a[i];
            v += params.gamma[i] * ra * ra / d;
        }
        return v;
    };

    Vector a = Vector::Zero(d);
    double share = 0.0;  // rho . a, maintained incrementally
    double previous_objective = objective(a);
    for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
        share = params.rho.dot(a);  // refresh to shed incremental rounding
        double max_change = 0.0;
        for (int i = 0; i < d; ++i) {
            const double rho_i = params.rho[i];
            const double others = share - rho_i * a[i];
            const double numerator = 2.0 * params.lambda * rho_i * (target - others) + linear[i];
            const double denominator =
                2.0 * params.lambda * rho_i * rho_i + 2.0 * params.gamma[i] * rho_i * rho_i / d;
            const double updated = std::clamp(numerator / denominator, 0.0, 1.0);
            max_change = std::max(max_change, std::abs(updated - a[i]));
            share = others + rho_i * updated;
            a[i] = updated;
        }
        const double current_objective = objective(a);
        if (current_objective > previous_objective + 1e-9 * (1.0 + std::abs(previous_objective))) {
            throw Error(ErrorKind::Numerical, "qp_argmin: objective increased across a sweep");
        }
        previous_objective = current_objective;
        if (max_change < kCoordinateTol) return a;
    }
    throw Error(ErrorKind::Optimization, "qp_argmin: coordinate descent did not converge");
}

ControlProblem build_control_problem(const ClusterParams& params, const Vector& target,
                                     double horizon) {
    const int d = params.dim();
    const int n = static_cast<int>(target.size()) - 1;
    if (n < 1) throw Error(ErrorKind::InvalidInput, "build_control_problem: target profile too short");

    auto target_at = [target, horizon, n](double t) {
        int idx = static_cast<int>(std::lround(t / horizon * n));
        return target[std::clamp(idx, 0, n)];
    };

    // Aggregated cluster volatility: (sigma^i)^2 = (1/N_i^2) sum_j (sigma^{i,j})^2.
    Vector sigma_agg(d);
    for (int i = 0; i < d; ++i) {
        sigma_agg[i] = params.sigma_load[i] / std::sqrt(static_cast<double>(params.loads[i]));
    }
    const Matrix sigma_matrix = sigma_agg.asDiagonal();

    ControlProblem problem;
    problem.dim = d;
    problem.horizon = horizon;
    problem.drift = [params](double, const Vector& x, const Vector& a) {
        return Vector(-params.theta.cwiseProduct(x - params.x_out) -
                      params.kappa.cwiseProduct(params.p_max).cwiseProduct(a));
    };
    problem.running_cost = [params, target_at](double t, const Vector& x, const Vector& a) {
        const int d_local = params.dim();
        const double track = params.rho.dot(a) - target_at(t);
        double cost = params.lambda * track * track;
        double per_cluster = 0.0;
        for (int i = 0; i < d_local; ++i) {
            const double ra = params.rho[i] * a[i];
            per_cluster += params.gamma[i] * ra * ra;
            per_cluster += params.eta[i] * positive_part_sq(x[i] - params.x_max[i]);
            per_cluster += params.eta[i] * positive_part_sq(params.x_min[i] - x[i]);
        }
        return cost + per_cluster / d_local;
    };
    problem.terminal_cost = [params](const Vector& x) {
        return (x - params.x_target).squaredNorm() / params.dim();
    };
    problem.terminal_cost_gradient = [params](const Vector& x) {
        return Vector(2.0 / params.dim() * (x - params.x_target));
    };
    problem.sigma = [sigma_matrix](double) { return sigma_matrix; };
    problem.actions = BoxSet{Vector::Zero(d), Vector::Ones(d)};
    problem.argmin_oracle = [params, target_at](double t, const Vector&, const Vector& delta) {
        return qp_argmin(params, target_at(t), delta);
    };
    return problem;
}

void write_profile_csv(const std::string& path, const Vector& profile, double horizon) {
    std::ofstream os(path);
    if (!os) throw Error(ErrorKind::InvalidInput, "write_profile_csv: cannot open " + path);
    os << "t,value\n";
    const int n = static_cast<int>(profile.size()) - 1;
    char buf[96];
    for (int k = 0; k <= n; ++k) {
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g\n", horizon * k / n, profile[k]);
        os << buf;
    }
}

void write_population(const std::string& path, const ClusterParams& params) {
    std::ofstream os(path);
    if (!os) throw Error(ErrorKind::InvalidInput, "write_population: cannot open " + path);
    os << "tcl-population v1\n";
    os << "clusters " << params.dim() << "\n";
    os << "lambda " << params.lambda << "\n";
    os << "# cluster theta kappa p_max sigma_load x_out x_target x_min x_max gamma eta rho loads\n";
    char buf[512];
    for (int i = 0; i < params.dim(); ++i) {
        std::snprintf(buf, sizeof(buf),
                      "%d %.17g %.17g %.17g %.17g %.17g %.17g %.17g %.17g %.17g %.17g %.17g %d\n",
                      i, params.theta[i], params.kappa[i], params.p_max[i], params.sigma_load[i],
                      params.x_out[i], params.x_target[i], params.x_min[i], params.x_max[i],
                      params.gamma[i], params.eta[i], params.rho[i], params.loads[i]);
        os << buf;
    }
}

}  // namespace revgrid::tcl
