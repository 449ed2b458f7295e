#pragma once

#include <Eigen/Dense>

namespace revgrid {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Gaussian marginal at a grid instant: mean and symmetric PSD covariance.
struct GaussianState {
    Vector mean;
    Matrix cov;

    int dim() const { return static_cast<int>(mean.size()); }
};

/// Affine drift x -> a*x + c. Used both for the instrumental grid drift and
/// for the per-step regression output of the backward solver.
struct AffineDrift {
    Matrix a;
    Vector c;

    Vector operator()(const Vector& x) const { return a * x + c; }
    int dim() const { return static_cast<int>(c.size()); }

    static AffineDrift zero(int d) { return {Matrix::Zero(d, d), Vector::Zero(d)}; }
};

}  // namespace revgrid
