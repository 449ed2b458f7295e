#include "revgrid/gaussian_flow.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "revgrid/errors.hpp"
#include "revgrid/linalg.hpp"
#include "revgrid/quadrature.hpp"

namespace revgrid {

namespace {

constexpr double kAdmissibleTol = 1e-10;

// Exact flow from the right end t_right down to t_left of one segment with
// constant coefficients (a, c).
GaussianState segment_backward(const GaussianState& right, const AffineDrift& drift,
                               const SigmaFn& sigma, double t_left, double t_right) {
    if (t_right == t_left) return right;
    const Matrix decay = matrix_exp(drift.a, -(t_right - t_left));
    QuadratureOptions opts;
    Matrix drift_kernel = integrate(
        [&](double s) { return matrix_exp(drift.a, -(s - t_left)); }, t_left, t_right, opts);
    Matrix noise_kernel = integrate(
        [&](double s) {
            Matrix e = matrix_exp(drift.a, -(s - t_left));
            return Matrix(e * sigma(s) * sigma(s).transpose() * e.transpose());
        },
        t_left, t_right, opts);
    GaussianState out;
    out.mean = decay * right.mean - drift_kernel * drift.c;
    out.cov = symmetrize(decay * right.cov * decay.transpose() - noise_kernel);
    return out;
}

}  // namespace

Vector backward_mean_step(const Vector& next, const AffineDrift& drift, double dt) {
    if (dt <= 0.0) throw Error(ErrorKind::InvalidInput, "backward_mean_step: dt must be positive");
    return matrix_exp(drift.a, -dt) * next - drift.c * dt;
}

Matrix backward_cov_step(const Matrix& next, const AffineDrift& drift, const Matrix& sigma_sq,
                         double dt) {
    if (dt <= 0.0) throw Error(ErrorKind::InvalidInput, "backward_cov_step: dt must be positive");
    const Matrix decay = matrix_exp(drift.a, -dt);
    return symmetrize(decay * next * decay.transpose() - sigma_sq * dt);
}

bool check_admissible(const Eigen::Ref<const Matrix>& q) {
    return min_eigenvalue(q) >= -kAdmissibleTol * std::abs(q.trace());
}

std::vector<GaussianState> continuous_backward_flow(const GaussianState& terminal,
                                                    const std::vector<AffineDrift>& schedule,
                                                    const SigmaFn& sigma, double horizon,
                                                    const std::vector<double>& times) {
    if (schedule.empty()) {
        throw Error(ErrorKind::InvalidInput, "continuous_backward_flow: empty drift schedule");
    }
    if (horizon <= 0.0) {
        throw Error(ErrorKind::InvalidInput, "continuous_backward_flow: horizon must be positive");
    }
    const int n = static_cast<int>(schedule.size());
    const double h = horizon / n;

    std::vector<std::size_t> order(times.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t i, std::size_t j) { return times[i] > times[j]; });

    std::vector<GaussianState> out(times.size());
    GaussianState carry = terminal;
    double t_carry = horizon;
    int segment = n - 1;  // segment whose right end is t_carry
    for (std::size_t idx : order) {
        const double t = times[idx];
        if (t < 0.0 || t > horizon) {
            throw Error(ErrorKind::InvalidInput, "continuous_backward_flow: time outside [0, T]");
        }
        while (segment >= 0 && t < segment * h) {
            carry = segment_backward(carry, schedule[segment], sigma, segment * h, t_carry);
            t_carry = segment * h;
            --segment;
        }
        const auto& drift = schedule[std::max(segment, 0)];
        out[idx] = segment_backward(carry, drift, sigma, t, t_carry);
    }
    return out;
}

bool sufficient_condition(const Eigen::Ref<const Matrix>& terminal_cov, const SigmaFn& sigma,
                          const std::vector<AffineDrift>& schedule, double horizon) {
    if (schedule.empty()) {
        throw Error(ErrorKind::InvalidInput, "sufficient_condition: empty drift schedule");
    }
    const int n = static_cast<int>(schedule.size());
    const double h = horizon / n;

    // suffix[j] propagates from t_{j} to T: A(T) A(t_j)^{-1}.
    std::vector<Matrix> suffix(n + 1);
    suffix[n] = Matrix::Identity(terminal_cov.rows(), terminal_cov.cols());
    for (int j = n - 1; j >= 0; --j) {
        suffix[j] = suffix[j + 1] * matrix_exp(schedule[j].a, h);
    }

    QuadratureOptions opts;
    double total = 0.0;
    for (int j = 0; j < n; ++j) {
        total += integrate(
            [&](double s) {
                Matrix phi = suffix[j + 1] * matrix_exp(schedule[j].a, (j + 1) * h - s);
                double sn = operator_norm(sigma(s));
                double pn = operator_norm(phi.transpose());
                return sn * sn * pn * pn;
            },
            j * h, (j + 1) * h, opts);
    }
    return min_eigenvalue(terminal_cov) >= total;
}

std::vector<AffineDrift> constant_schedule(const AffineDrift& drift, int n) {
    return std::vector<AffineDrift>(static_cast<std::size_t>(n), drift);
}

}  // namespace revgrid
