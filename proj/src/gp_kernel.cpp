#include "nethawkes/gp_kernel.hpp"

#include "nethawkes/errors.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace nethawkes {

void validate(const GpKernelSpec& spec) {
    if (!(spec.variance >= 0.0)) {
        throw std::invalid_argument("kernel variance must be nonnegative");
    }
    switch (spec.kind) {
    case GpKernelSpec::Kind::periodic:
        if (!(spec.period > 0.0)) {
            throw std::invalid_argument("periodic kernel needs a positive period");
        }
        [[fallthrough]];
    case GpKernelSpec::Kind::squared_exponential:
    case GpKernelSpec::Kind::quadratic:
        if (!(spec.length_scale > 0.0)) {
            throw std::invalid_argument("kernel length scale must be positive");
        }
        break;
    case GpKernelSpec::Kind::sum:
        if (spec.components.empty()) {
            throw std::invalid_argument("sum kernel needs at least one component");
        }
        for (const auto& c : spec.components) {
            validate(c);
        }
        break;
    }
}

double kernel_value(const GpKernelSpec& spec, double t, double t2) {
    switch (spec.kind) {
    case GpKernelSpec::Kind::periodic: {
        const double s = std::sin(std::numbers::pi * std::abs(t - t2) / spec.period);
        return spec.variance * std::exp(-2.0 * s * s / (spec.length_scale * spec.length_scale));
    }
    case GpKernelSpec::Kind::squared_exponential: {
        const double d = t - t2;
        return spec.variance * std::exp(-0.5 * d * d / (spec.length_scale * spec.length_scale));
    }
    case GpKernelSpec::Kind::quadratic: {
        const double q = 1.0 + t * t2 / (spec.length_scale * spec.length_scale);
        return spec.variance * q * q;
    }
    case GpKernelSpec::Kind::sum: {
        double total = 0.0;
        for (const auto& c : spec.components) {
            total += kernel_value(c, t, t2);
        }
        return total;
    }
    }
    return 0.0;
}

Eigen::MatrixXd gp_covariance(std::span<const double> times, const GpKernelSpec& spec) {
    validate(spec);
    const auto n = static_cast<Eigen::Index>(times.size());
    Eigen::MatrixXd cov(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        if (!std::isfinite(times[static_cast<std::size_t>(i)])) {
            throw std::invalid_argument("covariance times must be finite");
        }
        for (Eigen::Index j = 0; j <= i; ++j) {
            const double v = kernel_value(spec, times[static_cast<std::size_t>(i)],
                                          times[static_cast<std::size_t>(j)]);
            cov(i, j) = v;
            cov(j, i) = v;
        }
    }
    if (n > 0) {
        const double jitter = 1e-6 * cov.diagonal().maxCoeff();
        cov.diagonal().array() += jitter;
    }
    return cov;
}

Eigen::MatrixXd gp_cholesky(const Eigen::MatrixXd& covariance) {
    Eigen::LLT<Eigen::MatrixXd> llt(covariance);
    if (llt.info() != Eigen::Success) {
        throw NumericalError("kernel matrix is not positive definite after jitter");
    }
    return llt.matrixL();
}

} // namespace nethawkes
