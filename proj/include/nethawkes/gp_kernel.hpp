#pragma once

#include <Eigen/Core>

#include <span>
#include <vector>

namespace nethawkes {

/// Covariance function for the shared log-background y(t).
///
/// periodic:            variance * exp(-2 sin^2(pi |t - t'| / period) / length_scale^2)
/// squared_exponential: variance * exp(-(t - t')^2 / (2 length_scale^2))
/// quadratic:           variance * (1 + t t' / length_scale^2)^2
/// sum:                 pointwise sum of `components`
struct GpKernelSpec {
    enum class Kind { periodic, squared_exponential, quadratic, sum };

    Kind kind{Kind::squared_exponential};
    double period{1.0};
    double length_scale{1.0};
    double variance{1.0};
    std::vector<GpKernelSpec> components;
};

void validate(const GpKernelSpec& spec);

[[nodiscard]] double kernel_value(const GpKernelSpec& spec, double t, double t2);

/// Dense covariance over `times` with 1e-6 * (largest diagonal entry) added to the diagonal.
[[nodiscard]] Eigen::MatrixXd gp_covariance(std::span<const double> times, const GpKernelSpec& spec);

/// Lower Cholesky factor. Throws NumericalError when the matrix is not positive definite.
[[nodiscard]] Eigen::MatrixXd gp_cholesky(const Eigen::MatrixXd& covariance);

} // namespace nethawkes
