#include "nethawkes/random.hpp"

#include "nethawkes/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace nethawkes {

Rng make_substream(std::uint64_t seed, std::initializer_list<std::uint64_t> path) {
    std::vector<std::uint32_t> words;
    words.reserve(2 * (path.size() + 1));
    const auto push = [&](std::uint64_t v) {
        words.push_back(static_cast<std::uint32_t>(v & 0xffffffffu));
        words.push_back(static_cast<std::uint32_t>(v >> 32));
    };
    push(seed);
    for (auto v : path) {
        push(v);
    }
    std::seed_seq seq(words.begin(), words.end());
    return Rng(seq);
}

double sample_uniform(Rng& rng) {
    return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

double sample_normal(Rng& rng, double mean, double sd) {
    return std::normal_distribution<double>(mean, sd)(rng);
}

double sample_gamma(Rng& rng, double shape, double rate) {
    if (!(shape > 0.0) || !(rate > 0.0) || !std::isfinite(shape) || !std::isfinite(rate)) {
        throw DegenerateError("gamma draw needs positive finite shape and rate");
    }
    return std::gamma_distribution<double>(shape, 1.0 / rate)(rng);
}

double sample_beta(Rng& rng, double a, double b) {
    const double x = sample_gamma(rng, a, 1.0);
    const double y = sample_gamma(rng, b, 1.0);
    if (x + y == 0.0) {
        // both shapes tiny enough to underflow; the mass sits at the endpoints
        return sample_uniform(rng) < a / (a + b) ? 1.0 : 0.0;
    }
    return x / (x + y);
}

std::vector<double> sample_dirichlet(Rng& rng, std::span<const double> concentration) {
    std::vector<double> out(concentration.size());
    double total = 0.0;
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = sample_gamma(rng, concentration[i], 1.0);
        total += out[i];
    }
    if (total == 0.0) {
        throw DegenerateError("dirichlet draw underflowed");
    }
    for (auto& v : out) {
        v /= total;
    }
    return out;
}

long sample_poisson(Rng& rng, double mean) {
    if (mean <= 0.0) {
        return 0;
    }
    return std::poisson_distribution<long>(mean)(rng);
}

std::size_t sample_categorical(Rng& rng, std::span<const double> weights) {
    const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
    if (!(total > 0.0) || !std::isfinite(total)) {
        throw DegenerateError("categorical draw with no positive weight");
    }
    const double u = sample_uniform(rng) * total;
    double cumulative = 0.0;
    std::size_t last_positive = 0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        if (weights[i] > 0.0) {
            last_positive = i;
        }
        cumulative += weights[i];
        if (u < cumulative) {
            return i;
        }
    }
    return last_positive;
}

std::size_t sample_log_categorical(Rng& rng, std::span<const double> log_weights) {
    const double top = *std::max_element(log_weights.begin(), log_weights.end());
    if (!std::isfinite(top)) {
        throw DegenerateError("categorical draw with no positive weight");
    }
    std::vector<double> w(log_weights.size());
    for (std::size_t i = 0; i < w.size(); ++i) {
        w[i] = std::exp(log_weights[i] - top);
    }
    return sample_categorical(rng, w);
}

double log_sum_exp(std::span<const double> values) {
    if (values.empty()) {
        return -std::numeric_limits<double>::infinity();
    }
    const double top = *std::max_element(values.begin(), values.end());
    if (!std::isfinite(top)) {
        return top;
    }
    double acc = 0.0;
    for (double v : values) {
        acc += std::exp(v - top);
    }
    return top + std::log(acc);
}

double slice_sample(Rng& rng, double x0, const std::function<double(double)>& log_density,
                    double width, int max_steps_out) {
    const double level = log_density(x0) + std::log(sample_uniform(rng));
    double lo = x0 - width * sample_uniform(rng);
    double hi = lo + width;
    int j = static_cast<int>(std::floor(max_steps_out * sample_uniform(rng)));
    int k = max_steps_out - 1 - j;
    while (j-- > 0 && log_density(lo) > level) {
        lo -= width;
    }
    while (k-- > 0 && log_density(hi) > level) {
        hi += width;
    }
    for (;;) {
        const double x = lo + (hi - lo) * sample_uniform(rng);
        if (log_density(x) > level) {
            return x;
        }
        if (x < x0) {
            lo = x;
        } else {
            hi = x;
        }
    }
}

} // namespace nethawkes
