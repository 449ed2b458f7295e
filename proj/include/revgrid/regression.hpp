#pragma once

#include <iosfwd>
#include <string>

#include "revgrid/types.hpp"

namespace revgrid {

/// Multivariate polynomial of total degree <= degree (1 or 2 supported),
/// stored against the fixed monomial ordering: constant, linear terms in
/// index order, then quadratic terms (i <= j) lexicographic.
struct PolynomialModel {
    int dim = 0;
    int degree = 0;
    Vector coefficients;

    double value(const Vector& x) const;
    Vector gradient(const Vector& x) const;
};

/// Number of monomials of total degree <= degree in dimension dim.
int basis_size(int dim, int degree);

/// Monomial feature vector of x in the documented ordering.
Vector basis_features(const Vector& x, int degree);

struct FitDiagnostics {
    double design_condition = 0.0;      // sigma_max / sigma_min of the design matrix
    double mean_square_residual = 0.0;  // (1/N) sum of squared residuals
};

/// Least-squares polynomial fit of targets on the sample columns of points
/// (one sample per column). Rank-revealing SVD with singular values below
/// 1e-10 sigma_max treated as zero; minimal-norm solution on ties.
PolynomialModel fit_value(const Eigen::Ref<const Matrix>& points,
                          const Eigen::Ref<const Vector>& targets, int degree,
                          FitDiagnostics* diagnostics = nullptr);

/// Componentwise affine least squares: (a, c) minimizing
/// (1/N) sum_i |a x_i + c - y_i|^2 over the sample columns of points and
/// drift_targets. Minimal-norm on rank deficiency.
AffineDrift fit_affine_drift(const Eigen::Ref<const Matrix>& points,
                             const Eigen::Ref<const Matrix>& drift_targets,
                             FitDiagnostics* diagnostics = nullptr);

/// Text record: header (dim, degree, ordering tag) + coefficients at 17
/// significant digits.
void write_model(std::ostream& os, const PolynomialModel& model);
PolynomialModel read_model(std::istream& is);
void save_model(const PolynomialModel& model, const std::string& path);
PolynomialModel load_model(const std::string& path);

}  // namespace revgrid
