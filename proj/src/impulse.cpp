#include "nethawkes/impulse.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace nethawkes {

void validate(const ImpulseParams& p) {
    if (!(p.tau > 0.0) || !std::isfinite(p.tau)) {
        throw std::invalid_argument("impulse precision tau must be positive");
    }
    if (!(p.dt_max > 0.0) || !std::isfinite(p.dt_max)) {
        throw std::invalid_argument("impulse support dt_max must be positive");
    }
    if (!std::isfinite(p.mu)) {
        throw std::invalid_argument("impulse location mu must be finite");
    }
}

double logit(double u) {
    return std::log(u) - std::log1p(-u);
}

double logistic(double x) {
    if (x >= 0.0) {
        return 1.0 / (1.0 + std::exp(-x));
    }
    const double e = std::exp(x);
    return e / (1.0 + e);
}

double impulse_log_density(double dt, const ImpulseParams& p) {
    if (!(dt > 0.0) || !(dt < p.dt_max)) {
        return -std::numeric_limits<double>::infinity();
    }
    const double x = std::log(dt) - std::log(p.dt_max - dt);
    const double r = x - p.mu;
    // log(1/Z) with Z = dt (dt_max - dt) / dt_max * sqrt(2 pi / tau)
    return -0.5 * p.tau * r * r + 0.5 * std::log(p.tau / (2.0 * std::numbers::pi)) +
           std::log(p.dt_max) - std::log(dt) - std::log(p.dt_max - dt);
}

double impulse_density(double dt, const ImpulseParams& p) {
    if (!(dt > 0.0) || !(dt < p.dt_max)) {
        return 0.0;
    }
    return std::exp(impulse_log_density(dt, p));
}

double impulse_cdf(double dt, const ImpulseParams& p) {
    if (!(dt > 0.0)) {
        return 0.0;
    }
    if (!(dt < p.dt_max)) {
        return 1.0;
    }
    const double x = std::log(dt) - std::log(p.dt_max - dt);
    return 0.5 * std::erfc(-std::sqrt(p.tau) * (x - p.mu) / std::numbers::sqrt2);
}

double impulse_sample(const ImpulseParams& p, Rng& rng) {
    // Rejecting the (rare) draws that round onto an endpoint keeps the support open.
    for (;;) {
        const double x = sample_normal(rng, p.mu, 1.0 / std::sqrt(p.tau));
        const double dt = p.dt_max * logistic(x);
        if (dt > 0.0 && dt < p.dt_max) {
            return dt;
        }
    }
}

double impulse_density_max(const ImpulseParams& p) {
    // In logit space x the density is phi_tau(x - mu) * (2 + 2 cosh x) / dt_max.
    // Critical points solve tau (x - mu) = tanh(x / 2), so they lie in [mu - 1/tau, mu + 1/tau].
    const auto slope = [&](double x) { return -p.tau * (x - p.mu) + std::tanh(0.5 * x); };
    const auto log_g = [&](double x) {
        const double r = x - p.mu;
        const double ax = std::abs(x);
        // log(2 + 2 cosh x) = |x| + 2 log(1 + e^{-|x|})
        return -0.5 * p.tau * r * r + ax + 2.0 * std::log1p(std::exp(-ax));
    };
    const double lo = p.mu - 1.0 / p.tau - 1e-9;
    const double hi = p.mu + 1.0 / p.tau + 1e-9;
    constexpr int kScan = 4096;
    double best = log_g(lo);
    double prev_x = lo;
    double prev_s = slope(lo);
    for (int i = 1; i <= kScan; ++i) {
        const double x = lo + (hi - lo) * i / kScan;
        const double s = slope(x);
        if ((prev_s > 0.0) != (s > 0.0)) {
            double a = prev_x;
            double b = x;
            for (int it = 0; it < 200 && b - a > 1e-14 * (1.0 + std::abs(a)); ++it) {
                const double m = 0.5 * (a + b);
                if ((slope(a) > 0.0) == (slope(m) > 0.0)) {
                    a = m;
                } else {
                    b = m;
                }
            }
            best = std::max(best, log_g(0.5 * (a + b)));
        }
        best = std::max(best, log_g(x));
        prev_x = x;
        prev_s = s;
    }
    const double log_norm = 0.5 * std::log(p.tau / (2.0 * std::numbers::pi)) - std::log(p.dt_max);
    // Small relative pad absorbs the bisection tolerance.
    return std::exp(best + log_norm) * (1.0 + 1e-9);
}

} // namespace nethawkes
