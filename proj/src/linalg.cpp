#include "revgrid/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>
#include <sstream>

#include "revgrid/errors.hpp"

namespace revgrid {

namespace {

void require_finite(const Eigen::Ref<const Matrix>& m, const char* who) {
    if (!m.allFinite()) {
        throw Error(ErrorKind::InvalidInput, std::string(who) + ": non-finite matrix entries");
    }
}

std::string matrix_echo(const Eigen::Ref<const Matrix>& m) {
    std::ostringstream os;
    os << m;
    return os.str();
}

}  // namespace

Matrix matrix_exp(const Eigen::Ref<const Matrix>& m, double t) {
    require_finite(m, "matrix_exp");
    if (!std::isfinite(t)) throw Error(ErrorKind::InvalidInput, "matrix_exp: non-finite scale");
    if (t == 0.0) return Matrix::Identity(m.rows(), m.cols());
    return Matrix(m * t).exp();
}

Matrix project_psd(const Eigen::Ref<const Matrix>& q) {
    require_finite(q, "project_psd");
    Eigen::SelfAdjointEigenSolver<Matrix> eig(symmetrize(q));
    if (eig.info() != Eigen::Success) {
        throw Error(ErrorKind::Numerical,
                    "project_psd: eigendecomposition did not converge for\n" + matrix_echo(q));
    }
    if (eig.eigenvalues().minCoeff() >= 0.0) return symmetrize(q);
    Vector clamped = eig.eigenvalues().cwiseMax(0.0);
    return symmetrize(eig.eigenvectors() * clamped.asDiagonal() * eig.eigenvectors().transpose());
}

Matrix covariance_factor(const Eigen::Ref<const Matrix>& q) {
    require_finite(q, "covariance_factor");
    const Matrix sym = symmetrize(q);
    Eigen::LLT<Matrix> llt(sym);
    if (llt.info() == Eigen::Success) {
        return llt.matrixL();
    }
    Eigen::SelfAdjointEigenSolver<Matrix> eig(sym);
    if (eig.info() != Eigen::Success) {
        throw Error(ErrorKind::Numerical,
                    "covariance_factor: eigendecomposition did not converge for\n" + matrix_echo(q));
    }
    const double scale = sym.cwiseAbs().maxCoeff();
    if (eig.eigenvalues().minCoeff() < -1e-10 * std::max(scale, 1e-300)) {
        throw Error(ErrorKind::InvalidState,
                    "covariance_factor: matrix is not PSD within tolerance\n" + matrix_echo(q));
    }
    Vector roots = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return eig.eigenvectors() * roots.asDiagonal();
}

Vector sample_gaussian(const GaussianState& state, RngStream& rng) {
    const int d = state.dim();
    Matrix factor = covariance_factor(state.cov);
    return state.mean + factor * rng.normal_vector(d);
}

Vector solve_linear(const Eigen::Ref<const Matrix>& m, const Eigen::Ref<const Vector>& rhs) {
    require_finite(m, "solve_linear");
    if (!rhs.allFinite()) throw Error(ErrorKind::InvalidInput, "solve_linear: non-finite rhs");
    Eigen::PartialPivLU<Matrix> lu(m);
    const double rcond = lu.rcond();
    if (!(rcond > 1e-14)) {
        throw Error(ErrorKind::SingularMatrix,
                    "solve_linear: matrix singular or ill-conditioned (rcond=" +
                        std::to_string(rcond) + ")\n" + matrix_echo(m));
    }
    return lu.solve(rhs);
}

double min_eigenvalue(const Eigen::Ref<const Matrix>& q) {
    Eigen::SelfAdjointEigenSolver<Matrix> eig(symmetrize(q), Eigen::EigenvaluesOnly);
    if (eig.info() != Eigen::Success) {
        throw Error(ErrorKind::Numerical, "min_eigenvalue: eigendecomposition did not converge");
    }
    return eig.eigenvalues().minCoeff();
}

double operator_norm(const Eigen::Ref<const Matrix>& m) {
    Eigen::JacobiSVD<Matrix> svd(m);
    return svd.singularValues().size() == 0 ? 0.0 : svd.singularValues()[0];
}

Matrix symmetrize(const Eigen::Ref<const Matrix>& m) { return 0.5 * (m + m.transpose()); }

}  // namespace revgrid
