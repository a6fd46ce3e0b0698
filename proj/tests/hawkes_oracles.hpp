#pragma once

#include "nethawkes/model.hpp"
#include "nethawkes/random.hpp"
#include "oracles.hpp"

#include <functional>
#include <limits>
#include <numbers>

namespace oracle {

using namespace nethawkes;

// Logistic-normal density written out from its change of variables.
inline double lognormal_logit_density(double t, double mu, double tau, double dt_max) {
    if (!(t > 0.0) || !(t < dt_max)) {
        return 0.0;
    }
    const double x = std::log(t / (dt_max - t));
    const double jac = dt_max / (t * (dt_max - t));
    return jac * std::sqrt(tau / (2.0 * std::numbers::pi)) * std::exp(-0.5 * tau * (x - mu) * (x - mu));
}

inline double direct_intensity(const HawkesParams& p, const EventSequence& seq, int k, double t) {
    const auto& net = p.network;
    double lam = background_rate(p.background, k, t);
    for (const auto& e : seq.events()) {
        if (e.time < t && net.adjacency(e.process, k) != 0) {
            lam += net.weights(e.process, k) *
                   lognormal_logit_density(t - e.time, net.impulse_mu(e.process, k), net.impulse_tau(e.process, k),
                                           net.dt_max);
        }
    }
    return lam;
}

// Marginal log likelihood with the compensator by quadrature of the impulse densities.
inline double direct_marginal(const HawkesParams& p, const EventSequence& seq, bool truncate = true) {
    const auto& net = p.network;
    const double horizon = p.background.horizon;
    double ll = 0.0;
    for (const auto& e : seq.events()) {
        ll += std::log(direct_intensity(p, seq, e.process, e.time));
    }
    for (int k = 0; k < seq.num_processes(); ++k) {
        ll -= background_integral(p.background, k);
    }
    for (const auto& e : seq.events()) {
        for (int k = 0; k < seq.num_processes(); ++k) {
            if (net.adjacency(e.process, k) == 0) {
                continue;
            }
            const double upper = truncate ? std::min(net.dt_max, horizon - e.time) : net.dt_max;
            if (upper <= 0.0) {
                continue;
            }
            const double mu = net.impulse_mu(e.process, k);
            const double tau = net.impulse_tau(e.process, k);
            // Integrate in logit space, where the integrand is a smooth Gaussian.
            const double xu = upper >= net.dt_max ? std::numeric_limits<double>::infinity()
                                                  : std::log(upper / (net.dt_max - upper));
            const double mass = xu == std::numeric_limits<double>::infinity()
                                    ? 1.0
                                    : normal_cdf(xu, mu, 1.0 / std::sqrt(tau));
            ll -= net.weights(e.process, k) * mass;
        }
    }
    return ll;
}

// log-sum-exp of the augmented likelihood over every parent configuration.
inline double enumerate_parents(const HawkesParams& p, const EventSequence& seq,
                                IntegralMode mode = IntegralMode::exact_truncation) {
    const std::size_t n = seq.size();
    std::vector<std::vector<int>> options(n);
    for (std::size_t i = 0; i < n; ++i) {
        options[i].push_back(kBackgroundParent);
        for (std::size_t j = 0; j < i; ++j) {
            const double lag = seq[i].time - seq[j].time;
            if (lag > 0.0 && lag < p.network.dt_max) {
                options[i].push_back(static_cast<int>(j));
            }
        }
    }
    std::vector<double> terms;
    ParentAssignment z{std::vector<int>(n, kBackgroundParent)};
    std::function<void(std::size_t)> rec = [&](std::size_t i) {
        if (i == n) {
            terms.push_back(augmented_loglik(p, seq, z, mode));
            return;
        }
        for (int c : options[i]) {
            z.parent[i] = c;
            rec(i + 1);
        }
    };
    rec(0);
    double m = -std::numeric_limits<double>::infinity();
    for (double t : terms) {
        m = std::max(m, t);
    }
    if (m == -std::numeric_limits<double>::infinity()) {
        return m;
    }
    double s = 0.0;
    for (double t : terms) {
        s += std::exp(t - m);
    }
    return m + std::log(s);
}

// Small random network on K processes with N events scattered over [0, T].
struct Instance {
    HawkesParams params;
    EventSequence seq;
};

inline Instance random_instance(Rng& rng, int k, int n, double horizon, double dt_max, bool self_edges = true) {
    NetworkState net = NetworkState::disconnected(k, dt_max, 0.0, 1.0, self_edges);
    for (int i = 0; i < k; ++i) {
        for (int j = 0; j < k; ++j) {
            if (i == j && !self_edges) {
                continue;
            }
            net.adjacency(i, j) = sample_uniform(rng) < 0.7 ? 1 : 0;
            net.weights(i, j) = 0.1 + 1.5 * sample_uniform(rng);
            net.impulse_mu(i, j) = sample_normal(rng, 0.0, 1.0);
            net.impulse_tau(i, j) = 0.5 + 3.0 * sample_uniform(rng);
        }
    }
    std::vector<double> rates;
    for (int i = 0; i < k; ++i) {
        rates.push_back(0.2 + sample_uniform(rng));
    }
    std::vector<Event> events;
    for (int i = 0; i < n; ++i) {
        events.push_back({horizon * sample_uniform(rng), static_cast<int>(sample_uniform(rng) * k)});
    }
    return {HawkesParams{net, make_constant_background(rates, horizon)}, EventSequence(events, horizon, k)};
}

} // namespace oracle
