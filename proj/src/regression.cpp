#include "revgrid/regression.hpp"

#include <Eigen/SVD>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "revgrid/errors.hpp"

namespace revgrid {

namespace {

constexpr const char* kOrderingTag = "const-linear-quad-lex";
constexpr double kSingularValueCutoff = 1e-10;

void check_degree(int degree) {
    if (degree != 1 && degree != 2) {
        throw Error(ErrorKind::Configuration,
                    "polynomial degree " + std::to_string(degree) + " unsupported (use 1 or 2)");
    }
}

// Index of the coefficient of x_i x_j (i <= j) in the quadratic block.
inline int quad_index(int d, int i, int j) { return i * d - i * (i - 1) / 2 + (j - i); }

struct SvdFit {
    Matrix solution;
    double condition;
};

SvdFit solve_min_norm(const Matrix& design, const Matrix& rhs) {
    Eigen::BDCSVD<Matrix> svd(design, Eigen::ComputeThinU | Eigen::ComputeThinV);
    svd.setThreshold(kSingularValueCutoff);
    const auto& sv = svd.singularValues();
    double cond = 0.0;
    if (sv.size() > 0) {
        double smin = sv[sv.size() - 1];
        cond = smin > 0.0 ? sv[0] / smin : std::numeric_limits<double>::infinity();
    }
    return {svd.solve(rhs), cond};
}

}  // namespace

int basis_size(int dim, int degree) {
    check_degree(degree);
    if (dim < 1) throw Error(ErrorKind::InvalidInput, "basis_size: dim must be >= 1");
    int n = 1 + dim;
    if (degree == 2) n += dim * (dim + 1) / 2;
    return n;
}

Vector basis_features(const Vector& x, int degree) {
    const int d = static_cast<int>(x.size());
    Vector phi(basis_size(d, degree));
    phi[0] = 1.0;
    phi.segment(1, d) = x;
    if (degree == 2) {
        int idx = 1 + d;
        for (int i = 0; i < d; ++i) {
            for (int j = i; j < d; ++j) {
                phi[idx++] = x[i] * x[j];
            }
        }
    }
    return phi;
}

double PolynomialModel::value(const Vector& x) const {
    if (static_cast<int>(x.size()) != dim) {
        throw Error(ErrorKind::InvalidInput, "PolynomialModel::value: dimension mismatch");
    }
    double v = coefficients[0] + coefficients.segment(1, dim).dot(x);
    if (degree == 2) {
        int idx = 1 + dim;
        for (int i = 0; i < dim; ++i) {
            for (int j = i; j < dim; ++j) {
                v += coefficients[idx++] * x[i] * x[j];
            }
        }
    }
    return v;
}

Vector PolynomialModel::gradient(const Vector& x) const {
    if (static_cast<int>(x.size()) != dim) {
        throw Error(ErrorKind::InvalidInput, "PolynomialModel::gradient: dimension mismatch");
    }
    Vector g = coefficients.segment(1, dim);
    if (degree == 2) {
        const int base = 1 + dim;
        for (int i = 0; i < dim; ++i) {
            for (int j = i; j < dim; ++j) {
                const double c = coefficients[base + quad_index(dim, i, j)];
                if (i == j) {
                    g[i] += 2.0 * c * x[i];
                } else {
                    g[i] += c * x[j];
                    g[j] += c * x[i];
                }
            }
        }
    }
    return g;
}

PolynomialModel fit_value(const Eigen::Ref<const Matrix>& points,
                          const Eigen::Ref<const Vector>& targets, int degree,
                          FitDiagnostics* diagnostics) {
    check_degree(degree);
    const int d = static_cast<int>(points.rows());
    const int n = static_cast<int>(points.cols());
    const int b = basis_size(d, degree);
    if (n < b) {
        throw Error(ErrorKind::UnderDetermined,
                    "fit_value: " + std::to_string(n) + " samples for " + std::to_string(b) +
                        " basis functions");
    }
    if (targets.size() != n) {
        throw Error(ErrorKind::InvalidInput, "fit_value: sample/target count mismatch");
    }
    if (!targets.allFinite() || !points.allFinite()) {
        throw Error(ErrorKind::InvalidInput, "fit_value: non-finite samples or targets");
    }

    Matrix design(n, b);
    for (int i = 0; i < n; ++i) {
        design.row(i) = basis_features(points.col(i), degree).transpose();
    }
    SvdFit fit = solve_min_norm(design, targets);

    PolynomialModel model{d, degree, fit.solution.col(0)};
    if (diagnostics) {
        diagnostics->design_condition = fit.condition;
        diagnostics->mean_square_residual = (design * model.coefficients - targets).squaredNorm() / n;
    }
    return model;
}

AffineDrift fit_affine_drift(const Eigen::Ref<const Matrix>& points,
                             const Eigen::Ref<const Matrix>& drift_targets,
                             FitDiagnostics* diagnostics) {
    const int d = static_cast<int>(points.rows());
    const int n = static_cast<int>(points.cols());
    if (n < d + 1) {
        throw Error(ErrorKind::UnderDetermined,
                    "fit_affine_drift: " + std::to_string(n) + " samples for dimension " +
                        std::to_string(d));
    }
    if (drift_targets.rows() != d || drift_targets.cols() != n) {
        throw Error(ErrorKind::InvalidInput, "fit_affine_drift: target shape mismatch");
    }
    if (!points.allFinite() || !drift_targets.allFinite()) {
        throw Error(ErrorKind::InvalidInput, "fit_affine_drift: non-finite samples or targets");
    }

    Matrix design(n, d + 1);
    design.leftCols(d) = points.transpose();
    design.col(d).setOnes();
    SvdFit fit = solve_min_norm(design, drift_targets.transpose());

    AffineDrift drift;
    drift.a = fit.solution.topRows(d).transpose();
    drift.c = fit.solution.row(d).transpose();
    if (diagnostics) {
        diagnostics->design_condition = fit.condition;
        diagnostics->mean_square_residual =
            (design * fit.solution - drift_targets.transpose()).rowwise().squaredNorm().sum() / n;
    }
    return drift;
}

void write_model(std::ostream& os, const PolynomialModel& model) {
    os << "revgrid-polynomial-model v1\n";
    os << "dim " << model.dim << "\n";
    os << "degree " << model.degree << "\n";
    os << "ordering " << kOrderingTag << "\n";
    os << "coefficients " << model.coefficients.size() << "\n";
    char buf[64];
    for (Eigen::Index i = 0; i < model.coefficients.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%.17g", model.coefficients[i]);
        os << buf << "\n";
    }
}

PolynomialModel read_model(std::istream& is) {
    std::string line;
    auto fail = [](const std::string& why) -> PolynomialModel {
        throw Error(ErrorKind::InvalidInput, "read_model: " + why);
    };
    if (!std::getline(is, line) || line != "revgrid-polynomial-model v1") {
        return fail("bad magic line");
    }
    PolynomialModel model;
    std::string key, tag;
    Eigen::Index count = 0;
    is >> key >> model.dim;
    if (key != "dim") return fail("expected dim");
    is >> key >> model.degree;
    if (key != "degree") return fail("expected degree");
    is >> key >> tag;
    if (key != "ordering" || tag != kOrderingTag) return fail("unknown ordering tag");
    is >> key >> count;
    if (key != "coefficients") return fail("expected coefficients");
    if (count != basis_size(model.dim, model.degree)) return fail("coefficient count mismatch");
    model.coefficients.resize(count);
    for (Eigen::Index i = 0; i < count; ++i) {
        if (!(is >> model.coefficients[i])) return fail("truncated coefficient list");
    }
    return model;
}

void save_model(const PolynomialModel& model, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw Error(ErrorKind::InvalidInput, "save_model: cannot open " + path);
    write_model(os, model);
}

PolynomialModel load_model(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw Error(ErrorKind::InvalidInput, "load_model: cannot open " + path);
    return read_model(is);
}

}  // namespace revgrid
