#include "nethawkes/simulate.hpp"

#include "nethawkes/errors.hpp"
#include "nethawkes/stability.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <string>

namespace nethawkes {

namespace {

struct Pending {
    double time;
    int process;
    int parent;  // index into the generation-order list
};

void check_cap(std::size_t count, long cap) {
    if (static_cast<long>(count) > cap) {
        throw ExplosionError("simulation exceeded " + std::to_string(cap) +
                             " events; the parameters are likely unstable");
    }
}

// Child time strictly after the parent with the recomputed lag inside (0, dt_max).
double draw_child_time(double parent_time, const ImpulseParams& imp, Rng& rng) {
    while (true) {
        const double t = parent_time + impulse_sample(imp, rng);
        const double lag = t - parent_time;
        if (lag > 0.0 && lag < imp.dt_max) {
            return t;
        }
    }
}

SimulationResult finish(std::vector<Pending> generated, const HawkesParams& params, double radius) {
    std::vector<std::size_t> order(generated.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return generated[a].time < generated[b].time; });
    std::vector<int> position(generated.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        position[order[i]] = static_cast<int>(i);
    }
    std::vector<Event> events;
    events.reserve(order.size());
    ParentAssignment parents;
    parents.parent.reserve(order.size());
    for (const auto idx : order) {
        const auto& g = generated[idx];
        events.push_back({g.time, g.process});
        parents.parent.push_back(g.parent < 0 ? kBackgroundParent : position[static_cast<std::size_t>(g.parent)]);
    }
    const int k = params.network.size();
    return {EventSequence(std::move(events), params.background.horizon, k), std::move(parents), radius};
}

SimulationResult simulate_branching(const HawkesParams& params, Rng& rng, long cap, double radius) {
    const auto& net = params.network;
    const int num_k = net.size();
    const double horizon = params.background.horizon;
    std::vector<Pending> generated;
    for (int k = 0; k < num_k; ++k) {
        for (const double t : simulate_background(params.background, k, rng)) {
            generated.push_back({t, k, -1});
            check_cap(generated.size(), cap);
        }
    }
    // Breadth first: every generated event is expanded exactly once, in order.
    for (std::size_t head = 0; head < generated.size(); ++head) {
        const Pending parent = generated[head];
        for (int child = 0; child < num_k; ++child) {
            const double w = net.strength(parent.process, child);
            if (w == 0.0) {
                continue;
            }
            const long m = sample_poisson(rng, w);
            const auto imp = net.impulse(parent.process, child);
            for (long c = 0; c < m; ++c) {
                const double t = draw_child_time(parent.time, imp, rng);
                if (t <= horizon) {
                    generated.push_back({t, child, static_cast<int>(head)});
                    check_cap(generated.size(), cap);
                }
            }
        }
    }
    return finish(std::move(generated), params, radius);
}

SimulationResult simulate_thinning(const HawkesParams& params, Rng& rng, long cap, double radius) {
    const auto& net = params.network;
    const int num_k = net.size();
    const double horizon = params.background.horizon;
    double bg_bound = 0.0;
    for (int k = 0; k < num_k; ++k) {
        bg_bound += background_max_rate(params.background, k);
    }
    // Per parent process, the largest total rate it can add to all children at any lag.
    std::vector<double> excite_bound(static_cast<std::size_t>(num_k), 0.0);
    for (int k = 0; k < num_k; ++k) {
        for (int c = 0; c < num_k; ++c) {
            const double w = net.strength(k, c);
            if (w > 0.0) {
                excite_bound[static_cast<std::size_t>(k)] += w * impulse_density_max(net.impulse(k, c));
            }
        }
    }
    std::vector<Pending> generated;
    std::size_t window_lo = 0;
    double t = 0.0;
    std::vector<double> components;
    while (true) {
        while (window_lo < generated.size() && generated[window_lo].time <= t - net.dt_max) {
            ++window_lo;
        }
        double bound = bg_bound;
        for (std::size_t i = window_lo; i < generated.size(); ++i) {
            bound += excite_bound[static_cast<std::size_t>(generated[i].process)];
        }
        if (!(bound > 0.0)) {
            // Nothing can happen until the window empties; with no background it never will.
            if (bg_bound == 0.0 && window_lo == generated.size()) {
                break;
            }
            t = generated[window_lo].time + net.dt_max;
            continue;
        }
        t += -std::log1p(-sample_uniform(rng)) / bound;
        if (t > horizon) {
            break;
        }
        // Components: per process background, then each history event's contribution.
        components.clear();
        std::vector<std::pair<int, int>> labels;  // (process, parent or -1)
        for (int k = 0; k < num_k; ++k) {
            components.push_back(background_rate(params.background, k, t));
            labels.emplace_back(k, -1);
        }
        for (std::size_t i = window_lo; i < generated.size(); ++i) {
            const auto& p = generated[i];
            const double lag = t - p.time;
            if (!(lag > 0.0 && lag < net.dt_max)) {
                continue;
            }
            for (int c = 0; c < num_k; ++c) {
                const double w = net.strength(p.process, c);
                if (w > 0.0) {
                    components.push_back(w * impulse_density(lag, net.impulse(p.process, c)));
                    labels.emplace_back(c, static_cast<int>(i));
                }
            }
        }
        const double total = std::accumulate(components.begin(), components.end(), 0.0);
        if (sample_uniform(rng) * bound >= total) {
            continue;
        }
        const auto pick = sample_categorical(rng, components);
        generated.push_back({t, labels[pick].first, labels[pick].second});
        check_cap(generated.size(), cap);
    }
    return finish(std::move(generated), params, radius);
}

} // namespace

std::vector<double> simulate_background(const BackgroundModel& model, int k, Rng& rng) {
    std::vector<double> times;
    if (model.kind == BackgroundKind::constant) {
        const double rate = model.rates.at(static_cast<std::size_t>(k));
        if (rate <= 0.0) {
            return times;
        }
        double t = 0.0;
        while (true) {
            t += -std::log1p(-sample_uniform(rng)) / rate;
            if (t > model.horizon) {
                return times;
            }
            times.push_back(t);
        }
    }
    const double bound = background_max_rate(model, k);
    if (bound <= 0.0) {
        return times;
    }
    double t = 0.0;
    while (true) {
        t += -std::log1p(-sample_uniform(rng)) / bound;
        if (t > model.horizon) {
            return times;
        }
        if (sample_uniform(rng) * bound < background_rate(model, k, t)) {
            times.push_back(t);
        }
    }
}

SimulationResult simulate(const HawkesParams& params, Rng& rng, const SimulationOptions& options) {
    validate(params);
    const double radius = spectral_radius(params.network.adjacency, params.network.weights);
    if (options.method == SimulationMethod::thinning) {
        return simulate_thinning(params, rng, options.max_events, radius);
    }
    return simulate_branching(params, rng, options.max_events, radius);
}

std::vector<std::vector<std::size_t>> superposition_split(const std::vector<double>& times,
                                                          const std::vector<RateFunction>& rates, Rng& rng) {
    if (rates.empty()) {
        throw std::invalid_argument("superposition_split needs at least one component");
    }
    std::vector<std::vector<std::size_t>> parts(rates.size());
    std::vector<double> w(rates.size());
    for (std::size_t n = 0; n < times.size(); ++n) {
        for (std::size_t j = 0; j < rates.size(); ++j) {
            w[j] = rates[j](times[n]);
            if (!(w[j] >= 0.0)) {
                throw std::invalid_argument("component rates must be nonnegative");
            }
        }
        parts[sample_categorical(rng, w)].push_back(n);
    }
    return parts;
}

} // namespace nethawkes
