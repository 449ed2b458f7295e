#pragma once

#include <functional>
#include <vector>

#include "revgrid/types.hpp"

namespace revgrid {

using SigmaFn = std::function<Matrix(double)>;

/// One backward Euler-exponential step of the grid mean:
/// m_k = e^{-a dt} m_{k+1} - c dt.
Vector backward_mean_step(const Vector& next, const AffineDrift& drift, double dt);

/// One backward step of the grid covariance:
/// Q_k = e^{-a dt} Q_{k+1} e^{-a^T dt} - sigma_sq dt.
/// The result is symmetric but may be indefinite; the caller decides whether
/// to project.
Matrix backward_cov_step(const Matrix& next, const AffineDrift& drift, const Matrix& sigma_sq,
                         double dt);

/// Admissibility of a covariance candidate: min eigenvalue >= -1e-10 trace.
bool check_admissible(const Eigen::Ref<const Matrix>& q);

/// Exact mean/covariance of the instrumental process at the requested times,
/// flowing backward from the terminal state under a piecewise-constant drift
/// schedule (schedule[k] applies on [k h, (k+1) h] with h = horizon / size).
/// Integrals are evaluated by adaptive quadrature at 1e-10 relative
/// tolerance. Validation tool; not used inside the solver loop.
std::vector<GaussianState> continuous_backward_flow(const GaussianState& terminal,
                                                    const std::vector<AffineDrift>& schedule,
                                                    const SigmaFn& sigma, double horizon,
                                                    const std::vector<double>& times);

/// Sufficient condition for admissibility at t = 0:
/// min Sp(Q_T) >= int_0^T ||sigma(s)||^2 ||(A(T) A(s)^{-1})^T||^2 ds.
/// True guarantees check_admissible(Q(0)).
bool sufficient_condition(const Eigen::Ref<const Matrix>& terminal_cov, const SigmaFn& sigma,
                          const std::vector<AffineDrift>& schedule, double horizon);

/// n copies of the same drift, for constant-coefficient flows.
std::vector<AffineDrift> constant_schedule(const AffineDrift& drift, int n);

}  // namespace revgrid
