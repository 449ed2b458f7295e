#pragma once

#include <functional>
#include <variant>
#include <vector>

#include "revgrid/errors.hpp"
#include "revgrid/gaussian_flow.hpp"
#include "revgrid/types.hpp"

namespace revgrid {

/// Compact box of admissible actions, componentwise lower <= upper.
struct BoxSet {
    Vector lower;
    Vector upper;
};

/// Finite list of admissible actions.
struct FiniteSet {
    std::vector<Vector> actions;
};

using ActionSet = std::variant<BoxSet, FiniteSet>;

/// Controlled diffusion dX = b(t, X, alpha) dt + sigma(t) dW with running
/// cost f, terminal cost g and compact action set. Immutable after
/// construction; all evaluations are reentrant.
struct ControlProblem {
    using DriftFn = std::function<Vector(double, const Vector&, const Vector&)>;
    using RunningCostFn = std::function<double(double, const Vector&, const Vector&)>;
    using TerminalCostFn = std::function<double(const Vector&)>;
    using TerminalGradFn = std::function<Vector(const Vector&)>;
    using ArgminFn = std::function<Vector(double, const Vector&, const Vector&)>;

    int dim = 0;
    double horizon = 0.0;
    DriftFn drift;
    RunningCostFn running_cost;
    TerminalCostFn terminal_cost;
    TerminalGradFn terminal_cost_gradient;
    SigmaFn sigma;
    ActionSet actions;
    ArgminFn argmin_oracle;  // optional; generic fallback used when empty
};

/// Thrown when the generic box argmin fails to converge; carries the best
/// iterate found.
class OptimizationError : public Error {
public:
    OptimizationError(const std::string& what, Vector best_iterate)
        : Error(ErrorKind::Optimization, what), best_iterate_(std::move(best_iterate)) {}
    const Vector& best_iterate() const { return best_iterate_; }

private:
    Vector best_iterate_;
};

/// argmin over the action set of f(t, x, a) + <b(t, x, a), delta>.
/// Finite sets are enumerated exactly with lexicographic tie-breaking; box
/// sets delegate to the problem's oracle or a projected-gradient fallback.
Vector hamiltonian_argmin(const ControlProblem& problem, double t, const Vector& x,
                          const Vector& delta);

/// H(t, x, delta) = f + <b, delta> evaluated at hamiltonian_argmin.
double hamiltonian_value(const ControlProblem& problem, double t, const Vector& x,
                         const Vector& delta);

/// Scalar linear-quadratic test problem: b = a, f = a^2, g = x^2,
/// A = [-action_bound, action_bound], constant volatility.
ControlProblem lqr_problem_1d(double horizon, double action_bound, double noise);

}  // namespace revgrid
