#pragma once

#include "nethawkes/model.hpp"
#include "nethawkes/random.hpp"

#include <functional>
#include <vector>

namespace nethawkes {

enum class SimulationMethod { branching, thinning };

struct SimulationOptions {
    SimulationMethod method{SimulationMethod::branching};
    long max_events{10'000'000};
};

struct SimulationResult {
    EventSequence events;
    ParentAssignment parents;
    /// Spectral radius of A (.) W; values >= 1 mean the parameters are unstable.
    double spectral_radius{0.0};
};

/// Draws events on [0, background.horizon]. Throws ExplosionError past `max_events`.
[[nodiscard]] SimulationResult simulate(const HawkesParams& params, Rng& rng,
                                        const SimulationOptions& options = {});

/// Homogeneous or LGCP background events for one process, sorted.
[[nodiscard]] std::vector<double> simulate_background(const BackgroundModel& model, int k, Rng& rng);

using RateFunction = std::function<double(double)>;

/// Assigns each time to component j with probability rates[j](t) / sum_i rates[i](t).
/// Returns the indices of `times` falling to each component.
[[nodiscard]] std::vector<std::vector<std::size_t>> superposition_split(const std::vector<double>& times,
                                                                        const std::vector<RateFunction>& rates,
                                                                        Rng& rng);

} // namespace nethawkes
