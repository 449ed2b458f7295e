#pragma once

#include <cmath>
#include <type_traits>
#include <utility>

#include "revgrid/errors.hpp"

namespace revgrid {

struct QuadratureOptions {
    double rel_tol = 1e-10;
    double abs_tol = 1e-14;
    int max_depth = 48;
};

namespace detail {

// 15-point Kronrod extension of 7-point Gauss on [-1, 1].
inline constexpr double kGk15Nodes[15] = {
    -0.991455371120813, -0.949107912342759, -0.864864423359769, -0.741531185599394,
    -0.586087235467691, -0.405845151377397, -0.207784955007898, 0.0,
    0.207784955007898,  0.405845151377397,  0.586087235467691,  0.741531185599394,
    0.864864423359769,  0.949107912342759,  0.991455371120813};

inline constexpr double kKronrodWeights[15] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250, 0.140653259715525,
    0.169004726639267, 0.190350578064785, 0.204432940075298, 0.209482141084728,
    0.204432940075298, 0.190350578064785, 0.169004726639267, 0.140653259715525,
    0.104790010322250, 0.063092092629979, 0.022935322010529};

// Gauss-7 weights aligned with the odd Kronrod node positions (indices 1,3,...,13).
inline constexpr double kGaussWeights[7] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119, 0.417959183673469,
    0.381830050505119, 0.279705391489277, 0.129484966168870};

template <class T>
double value_norm(const T& v) {
    if constexpr (std::is_arithmetic_v<T>) {
        return std::abs(static_cast<double>(v));
    } else {
        return v.cwiseAbs().maxCoeff();
    }
}

template <class F>
struct GkEstimate {
    using Value = std::decay_t<decltype(std::declval<F&>()(0.0))>;
    Value integral;
    double error;
};

template <class F>
GkEstimate<F> gk15(F& f, double a, double b) {
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    using Value = typename GkEstimate<F>::Value;
    Value fk = f(mid + half * kGk15Nodes[0]);
    Value kronrod = kKronrodWeights[0] * fk;
    Value gauss = 0.0 * kronrod;  // zero of the same shape
    for (int i = 1; i < 15; ++i) {
        fk = f(mid + half * kGk15Nodes[i]);
        kronrod += kKronrodWeights[i] * fk;
        if (i % 2 == 1) gauss += kGaussWeights[(i - 1) / 2] * fk;
    }
    kronrod *= half;
    gauss *= half;
    return {kronrod, value_norm<Value>(kronrod - gauss)};
}

template <class F>
void gk_refine(F& f, double a, double b, const GkEstimate<F>& est, double budget_per_len,
               int depth, const QuadratureOptions& opts, typename GkEstimate<F>::Value& acc) {
    if (est.error <= budget_per_len * (b - a) || est.error == 0.0) {
        acc += est.integral;
        return;
    }
    if (depth >= opts.max_depth) {
        throw Error(ErrorKind::Numerical,
                    "adaptive quadrature failed to converge (max refinement depth reached)");
    }
    const double mid = 0.5 * (a + b);
    auto left = gk15(f, a, mid);
    auto right = gk15(f, mid, b);
    gk_refine(f, a, mid, left, budget_per_len, depth + 1, opts, acc);
    gk_refine(f, mid, b, right, budget_per_len, depth + 1, opts, acc);
}

}  // namespace detail

/// Adaptive Gauss-Kronrod integration of f over [a, b]. The integrand may
/// return a double or any Eigen dense expression evaluating to a fixed shape.
template <class F>
auto integrate(F&& f, double a, double b, const QuadratureOptions& opts = {}) {
    using Value = typename detail::GkEstimate<F>::Value;
    if (a == b) {
        Value zero = 0.0 * f(a);
        return zero;
    }
    auto whole = detail::gk15(f, a, b);
    double scale = detail::value_norm<Value>(whole.integral);
    double budget = std::max(opts.abs_tol, opts.rel_tol * scale) / std::abs(b - a);
    Value acc = 0.0 * whole.integral;
    detail::gk_refine(f, a, b, whole, budget, 0, opts, acc);
    return acc;
}

}  // namespace revgrid
