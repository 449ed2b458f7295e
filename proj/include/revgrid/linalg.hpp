#pragma once

#include "revgrid/rng.hpp"
#include "revgrid/types.hpp"

namespace revgrid {

/// e^{m t} by scaling-and-squaring with Pade approximation.
/// Throws ErrorKind::InvalidInput on non-finite entries.
Matrix matrix_exp(const Eigen::Ref<const Matrix>& m, double t = 1.0);

/// Frobenius projection onto the PSD cone: eigendecompose, clamp negative
/// eigenvalues to exactly zero, reconstruct. Idempotent, symmetry-preserving.
Matrix project_psd(const Eigen::Ref<const Matrix>& q);

/// Factor L with L L^T = q for a PSD matrix q, exact on rank-deficient input.
/// Cholesky fast path, eigendecomposition-based square root as the
/// rank-revealing fallback. Throws ErrorKind::InvalidState if q fails the PSD
/// tolerance (min eigenvalue < -1e-10 * norm scale).
Matrix covariance_factor(const Eigen::Ref<const Matrix>& q);

/// mean + L z with z standard normal and L = covariance_factor(cov).
Vector sample_gaussian(const GaussianState& state, RngStream& rng);

/// Solve m x = rhs. Throws ErrorKind::SingularMatrix when the reciprocal
/// condition estimate indicates cond(m) > 1e14.
Vector solve_linear(const Eigen::Ref<const Matrix>& m, const Eigen::Ref<const Vector>& rhs);

/// Smallest eigenvalue of a symmetric matrix.
double min_eigenvalue(const Eigen::Ref<const Matrix>& q);

/// Operator 2-norm (largest singular value).
double operator_norm(const Eigen::Ref<const Matrix>& m);

/// 0.5 (m + m^T), enforcing exact symmetry after lossy updates.
Matrix symmetrize(const Eigen::Ref<const Matrix>& m);

}  // namespace revgrid
