#include "revgrid/problem.hpp"

#include <algorithm>
#include <cmath>

namespace revgrid {

namespace {

bool lex_less(const Vector& a, const Vector& b) {
    return std::lexicographical_compare(a.data(), a.data() + a.size(), b.data(),
                                        b.data() + b.size());
}

double objective(const ControlProblem& p, double t, const Vector& x, const Vector& delta,
                 const Vector& a) {
    return p.running_cost(t, x, a) + p.drift(t, x, a).dot(delta);
}

Vector finite_argmin(const ControlProblem& p, const FiniteSet& set, double t, const Vector& x,
                     const Vector& delta) {
    if (set.actions.empty()) {
        throw Error(ErrorKind::InvalidInput, "hamiltonian_argmin: empty finite action set");
    }
    const Vector* best = nullptr;
    double best_value = 0.0;
    for (const Vector& a : set.actions) {
        const double v = objective(p, t, x, delta, a);
        if (!best || v < best_value || (v == best_value && lex_less(a, *best))) {
            best = &a;
            best_value = v;
        }
    }
    return *best;
}

Vector numerical_gradient(const ControlProblem& p, double t, const Vector& x, const Vector& delta,
                          const Vector& a) {
    const double h = 1e-6 * (1.0 + a.norm());
    Vector g(a.size());
    Vector probe = a;
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        probe[i] = a[i] + h;
        const double up = objective(p, t, x, delta, probe);
        probe[i] = a[i] - h;
        const double down = objective(p, t, x, delta, probe);
        probe[i] = a[i];
        g[i] = (up - down) / (2.0 * h);
    }
    return g;
}

Vector projected_gradient_argmin(const ControlProblem& p, const BoxSet& box, double t,
                                 const Vector& x, const Vector& delta) {
    constexpr int kMaxIterations = 10000;
    constexpr double kDecreaseTol = 1e-12;

    Vector a = 0.5 * (box.lower + box.upper);
    double value = objective(p, t, x, delta, a);
    double step = 1.0;
    const double step_floor = 1e-18 * (1.0 + (box.upper - box.lower).norm());

    for (int iter = 0; iter < kMaxIterations; ++iter) {
        const Vector g = numerical_gradient(p, t, x, delta, a);
        Vector candidate = (a - step * g).cwiseMax(box.lower).cwiseMin(box.upper);
        const double candidate_value = objective(p, t, x, delta, candidate);
        if (candidate_value < value) {
            const double decrease = value - candidate_value;
            a = std::move(candidate);
            value = candidate_value;
            step = std::min(step * 2.0, 1e6);
            if (decrease < kDecreaseTol) return a;
        } else {
            step *= 0.5;
            if (step < step_floor) return a;  // no feasible descent left
        }
    }
    throw OptimizationError("hamiltonian_argmin: projected gradient did not converge", a);
}

}  // namespace

Vector hamiltonian_argmin(const ControlProblem& problem, double t, const Vector& x,
                          const Vector& delta) {
    if (!delta.allFinite()) {
        throw Error(ErrorKind::InvalidInput, "hamiltonian_argmin: non-finite gradient");
    }
    if (const auto* finite = std::get_if<FiniteSet>(&problem.actions)) {
        return finite_argmin(problem, *finite, t, x, delta);
    }
    const auto& box = std::get<BoxSet>(problem.actions);
    if (problem.argmin_oracle) return problem.argmin_oracle(t, x, delta);
    return projected_gradient_argmin(problem, box, t, x, delta);
}

double hamiltonian_value(const ControlProblem& problem, double t, const Vector& x,
                         const Vector& delta) {
    const Vector a = hamiltonian_argmin(problem, t, x, delta);
    return problem.running_cost(t, x, a) + problem.drift(t, x, a).dot(delta);
}

ControlProblem lqr_problem_1d(double horizon, double action_bound, double noise) {
    ControlProblem p;
    p.dim = 1;
    p.horizon = horizon;
    p.drift = [](double, const Vector&, const Vector& a) { return a; };
    p.running_cost = [](double, const Vector&, const Vector& a) { return a.squaredNorm(); };
    p.terminal_cost = [](const Vector& x) { return x.squaredNorm(); };
    p.terminal_cost_gradient = [](const Vector& x) { return Vector(2.0 * x); };
    p.sigma = [noise](double) { return Matrix::Constant(1, 1, noise); };
    p.actions = BoxSet{Vector::Constant(1, -action_bound), Vector::Constant(1, action_bound)};
    p.argmin_oracle = [action_bound](double, const Vector&, const Vector& delta) {
        return Vector::Constant(1, std::clamp(-0.5 * delta[0], -action_bound, action_bound));
    };
    return p;
}

}  // namespace revgrid
