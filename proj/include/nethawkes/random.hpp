#pragma once

#include <cstdint>
#include <functional>
#include <initializer_list>
#include <random>
#include <span>
#include <vector>

namespace nethawkes {

using Rng = std::mt19937_64;

/// Independent generator keyed by (seed, path). Parallel sections key their
/// per-item streams this way so output never depends on the thread count.
[[nodiscard]] Rng make_substream(std::uint64_t seed, std::initializer_list<std::uint64_t> path);

[[nodiscard]] double sample_uniform(Rng& rng);
[[nodiscard]] double sample_normal(Rng& rng, double mean, double sd);

/// Gamma with shape/rate (inverse-scale) parameterization.
[[nodiscard]] double sample_gamma(Rng& rng, double shape, double rate);
[[nodiscard]] double sample_beta(Rng& rng, double a, double b);
[[nodiscard]] std::vector<double> sample_dirichlet(Rng& rng, std::span<const double> concentration);
[[nodiscard]] long sample_poisson(Rng& rng, double mean);

/// Index drawn proportionally to nonnegative weights. Throws DegenerateError on zero total mass.
[[nodiscard]] std::size_t sample_categorical(Rng& rng, std::span<const double> weights);
/// Same, with weights given in log space (-inf allowed).
[[nodiscard]] std::size_t sample_log_categorical(Rng& rng, std::span<const double> log_weights);

[[nodiscard]] double log_sum_exp(std::span<const double> values);

/// One univariate slice-sampling transition (stepping out + shrinkage).
[[nodiscard]] double slice_sample(Rng& rng, double x0, const std::function<double(double)>& log_density,
                                  double width, int max_steps_out = 32);

} // namespace nethawkes
