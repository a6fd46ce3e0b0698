#include "nethawkes/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace nethawkes {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
} // namespace

NetworkState NetworkState::disconnected(int num_processes, double dt_max, double mu, double tau,
                                        bool allow_self_edges) {
    NetworkState net;
    net.adjacency = Eigen::MatrixXi::Zero(num_processes, num_processes);
    net.weights = Eigen::MatrixXd::Zero(num_processes, num_processes);
    net.impulse_mu = Eigen::MatrixXd::Constant(num_processes, num_processes, mu);
    net.impulse_tau = Eigen::MatrixXd::Constant(num_processes, num_processes, tau);
    net.dt_max = dt_max;
    net.allow_self_edges = allow_self_edges;
    return net;
}

void validate(const NetworkState& net) {
    const auto k = net.adjacency.rows();
    if (k < 1 || net.adjacency.cols() != k) {
        throw std::invalid_argument("adjacency must be square and nonempty");
    }
    if (net.weights.rows() != k || net.weights.cols() != k || net.impulse_mu.rows() != k ||
        net.impulse_mu.cols() != k || net.impulse_tau.rows() != k || net.impulse_tau.cols() != k) {
        throw std::invalid_argument("network matrices must share the adjacency shape");
    }
    if (!(net.dt_max > 0.0) || !std::isfinite(net.dt_max)) {
        throw std::invalid_argument("dt_max must be positive");
    }
    for (Eigen::Index i = 0; i < k; ++i) {
        for (Eigen::Index j = 0; j < k; ++j) {
            const int a = net.adjacency(i, j);
            if (a != 0 && a != 1) {
                throw std::invalid_argument("adjacency entries must be 0 or 1");
            }
            if (!(net.weights(i, j) >= 0.0) || !std::isfinite(net.weights(i, j))) {
                throw std::invalid_argument("weights must be finite and nonnegative");
            }
            if (!(net.impulse_tau(i, j) > 0.0) || !std::isfinite(net.impulse_mu(i, j))) {
                throw std::invalid_argument("impulse parameters need finite mu and positive tau");
            }
        }
        if (!net.allow_self_edges && net.adjacency(i, i) != 0) {
            throw std::invalid_argument("self edge present but self edges are disabled");
        }
    }
}

void validate(const HawkesParams& params) {
    validate(params.network);
    validate(params.background);
    if (params.background.num_processes() != params.network.size()) {
        throw std::invalid_argument("background and network disagree on the number of processes");
    }
}

std::vector<std::size_t> history_window_starts(const EventSequence& seq, double dt_max) {
    const auto times = seq.times();
    std::vector<std::size_t> start(times.size());
    std::size_t lo = 0;
    for (std::size_t n = 0; n < times.size(); ++n) {
        while (lo < n && !(times[n] - times[lo] < dt_max)) {
            ++lo;
        }
        start[n] = lo;
    }
    return start;
}

double intensity(const HawkesParams& params, const EventSequence& seq, int k, double t) {
    const auto& net = params.network;
    double rate = background_rate(params.background, k, t);
    const auto times = seq.times();
    auto first = std::upper_bound(times.begin(), times.end(), t - net.dt_max);
    const auto last = std::lower_bound(times.begin(), times.end(), t);
    for (auto it = first; it != last; ++it) {
        const auto& parent = seq[static_cast<std::size_t>(it - times.begin())];
        const double w = net.strength(parent.process, k);
        if (w > 0.0) {
            rate += w * impulse_density(t - parent.time, net.impulse(parent.process, k));
        }
    }
    return rate;
}

double impulse_mass(const NetworkState& net, int from, int to, double s, double horizon,
                    IntegralMode mode) {
    const double w = net.strength(from, to);
    if (w == 0.0) {
        return 0.0;
    }
    if (mode == IntegralMode::full_mass || horizon - s >= net.dt_max) {
        return w;
    }
    return w * impulse_cdf(horizon - s, net.impulse(from, to));
}

namespace {

// Sum over events of log intensity at the event, for events with index in [first, last).
double log_intensity_sum(const HawkesParams& params, const EventSequence& seq,
                         const std::vector<std::size_t>& starts, std::size_t first, std::size_t last) {
    const auto& net = params.network;
    double acc = 0.0;
    for (std::size_t n = first; n < last; ++n) {
        const auto& ev = seq[n];
        double rate = background_rate(params.background, ev.process, ev.time);
        for (std::size_t m = starts[n]; m < n; ++m) {
            const auto& p = seq[m];
            const double lag = ev.time - p.time;
            const double w = net.strength(p.process, ev.process);
            if (lag > 0.0 && w > 0.0) {
                rate += w * impulse_density(lag, net.impulse(p.process, ev.process));
            }
        }
        if (!(rate > 0.0)) {
            return kNegInf;
        }
        acc += std::log(rate);
    }
    return acc;
}

} // namespace

double marginal_loglik(const HawkesParams& params, const EventSequence& seq, IntegralMode mode) {
    const auto& net = params.network;
    const int num_k = net.size();
    const auto starts = history_window_starts(seq, net.dt_max);
    const double log_part = log_intensity_sum(params, seq, starts, 0, seq.size());
    if (!std::isfinite(log_part)) {
        return kNegInf;
    }
    double compensator = 0.0;
    for (int k = 0; k < num_k; ++k) {
        compensator += background_integral(params.background, k, 0.0, seq.horizon());
    }
    for (const auto& ev : seq.events()) {
        for (int k = 0; k < num_k; ++k) {
            compensator += impulse_mass(net, ev.process, k, ev.time, seq.horizon(), mode);
        }
    }
    return log_part - compensator;
}

double window_loglik(const HawkesParams& params, const EventSequence& seq, double t0, double t1) {
    const auto& net = params.network;
    const int num_k = net.size();
    const auto starts = history_window_starts(seq, net.dt_max);
    const auto times = seq.times();
    const auto first = static_cast<std::size_t>(std::lower_bound(times.begin(), times.end(), t0) - times.begin());
    const auto last = static_cast<std::size_t>(std::upper_bound(times.begin(), times.end(), t1) - times.begin());
    const double log_part = log_intensity_sum(params, seq, starts, first, last);
    if (!std::isfinite(log_part)) {
        return kNegInf;
    }
    double compensator = 0.0;
    for (int k = 0; k < num_k; ++k) {
        compensator += background_integral(params.background, k, t0, t1);
    }
    for (std::size_t n = 0; n < last; ++n) {
        const auto& ev = seq[n];
        if (ev.time + net.dt_max <= t0) {
            continue;
        }
        for (int k = 0; k < num_k; ++k) {
            const double w = net.strength(ev.process, k);
            if (w == 0.0) {
                continue;
            }
            const auto imp = net.impulse(ev.process, k);
            compensator += w * (impulse_cdf(t1 - ev.time, imp) - impulse_cdf(t0 - ev.time, imp));
        }
    }
    return log_part - compensator;
}

void validate_parents(const NetworkState& net, const EventSequence& seq, const ParentAssignment& parents) {
    if (parents.parent.size() != seq.size()) {
        throw std::invalid_argument("parent assignment must cover every event");
    }
    for (std::size_t n = 0; n < seq.size(); ++n) {
        const int z = parents.parent[n];
        if (z == kBackgroundParent) {
            continue;
        }
        if (z < 0 || static_cast<std::size_t>(z) >= n) {
            throw std::invalid_argument("event " + std::to_string(n) + " has parent " + std::to_string(z) +
                                        " that is not an earlier event");
        }
        const double lag = seq[n].time - seq[static_cast<std::size_t>(z)].time;
        if (!(lag > 0.0) || !(lag < net.dt_max)) {
            throw std::invalid_argument("event " + std::to_string(n) + " has a parent lag outside (0, dt_max)");
        }
    }
}

double augmented_loglik(const HawkesParams& params, const EventSequence& seq,
                        const ParentAssignment& parents, IntegralMode mode) {
    const auto& net = params.network;
    validate_parents(net, seq, parents);
    const int num_k = net.size();
    double ll = 0.0;
    for (int k = 0; k < num_k; ++k) {
        ll -= background_integral(params.background, k, 0.0, seq.horizon());
    }
    for (std::size_t n = 0; n < seq.size(); ++n) {
        const auto& ev = seq[n];
        for (int k = 0; k < num_k; ++k) {
            ll -= impulse_mass(net, ev.process, k, ev.time, seq.horizon(), mode);
        }
        const int z = parents.parent[n];
        double rate = 0.0;
        if (z == kBackgroundParent) {
            rate = background_rate(params.background, ev.process, ev.time);
        } else {
            const auto& p = seq[static_cast<std::size_t>(z)];
            rate = net.strength(p.process, ev.process) *
                   impulse_density(ev.time - p.time, net.impulse(p.process, ev.process));
        }
        if (!(rate > 0.0)) {
            return kNegInf;
        }
        ll += std::log(rate);
    }
    return ll;
}

} // namespace nethawkes
