#pragma once

#include "nethawkes/random.hpp"

namespace nethawkes {

/// Logistic-normal impulse on (0, dt_max): the lag is dt_max * logistic(x) with x ~ Normal(mu, 1/tau).
struct ImpulseParams {
    double mu{0.0};
    double tau{1.0};
    double dt_max{1.0};
};

void validate(const ImpulseParams& p);

[[nodiscard]] double logit(double u);
[[nodiscard]] double logistic(double x);

/// Zero outside the open support (0, dt_max), including both endpoints.
[[nodiscard]] double impulse_density(double dt, const ImpulseParams& p);
[[nodiscard]] double impulse_log_density(double dt, const ImpulseParams& p);

/// Probability mass on (0, dt], clamped to [0, 1] outside the support.
[[nodiscard]] double impulse_cdf(double dt, const ImpulseParams& p);

[[nodiscard]] double impulse_sample(const ImpulseParams& p, Rng& rng);

/// Supremum of the density over its support, for thinning bounds.
[[nodiscard]] double impulse_density_max(const ImpulseParams& p);

} // namespace nethawkes
