#pragma once

#include "nethawkes/background.hpp"
#include "nethawkes/events.hpp"
#include "nethawkes/impulse.hpp"

#include <Eigen/Core>

#include <vector>

namespace nethawkes {

/// Sparse excitatory network: h_{k,k'}(dt) = A(k,k') W(k,k') g(dt | mu(k,k'), tau(k,k')).
/// Rows index the parent process, columns the child process.
struct NetworkState {
    Eigen::MatrixXi adjacency;
    Eigen::MatrixXd weights;
    Eigen::MatrixXd impulse_mu;
    Eigen::MatrixXd impulse_tau;
    double dt_max{1.0};
    bool allow_self_edges{false};

    [[nodiscard]] int size() const noexcept { return static_cast<int>(adjacency.rows()); }
    [[nodiscard]] ImpulseParams impulse(int from, int to) const {
        return {impulse_mu(from, to), impulse_tau(from, to), dt_max};
    }
    /// A(k,k') W(k,k'): the expected number of children per parent event.
    [[nodiscard]] double strength(int from, int to) const {
        return adjacency(from, to) != 0 ? weights(from, to) : 0.0;
    }

    /// All-zero adjacency and weights, impulses at (mu, tau).
    [[nodiscard]] static NetworkState disconnected(int num_processes, double dt_max, double mu = 0.0,
                                                   double tau = 1.0, bool allow_self_edges = false);
};

void validate(const NetworkState& net);

struct HawkesParams {
    NetworkState network;
    BackgroundModel background;
};

void validate(const HawkesParams& params);

/// How the expected number of children of an event near the end of the window is counted.
/// exact_truncation integrates the impulse over (s_n, T] only; full_mass counts W
/// whole, which is accurate when dt_max << T.
enum class IntegralMode { exact_truncation, full_mass };

inline constexpr int kBackgroundParent = -1;

/// Latent cause of each event: kBackgroundParent, or the index of an earlier event
/// in the time-sorted sequence.
struct ParentAssignment {
    std::vector<int> parent;
};

/// For event n, the first index whose lag to n is below dt_max. Candidates for
/// parenting n are [window_start[n], n) with strictly positive lag.
[[nodiscard]] std::vector<std::size_t> history_window_starts(const EventSequence& seq, double dt_max);

[[nodiscard]] double intensity(const HawkesParams& params, const EventSequence& seq, int k, double t);

/// Expected children on `to` from a parent event on `from` at time s, in a window ending at T.
[[nodiscard]] double impulse_mass(const NetworkState& net, int from, int to, double s, double horizon,
                                  IntegralMode mode);

/// log p({s_n, c_n}) with parents marginalized. Returns -infinity when some event has zero intensity.
[[nodiscard]] double marginal_loglik(const HawkesParams& params, const EventSequence& seq,
                                     IntegralMode mode = IntegralMode::exact_truncation);

/// Same quantity restricted to [t0, t1]: log intensities of events in the window
/// minus the compensator over it, conditioned on all earlier history.
[[nodiscard]] double window_loglik(const HawkesParams& params, const EventSequence& seq, double t0,
                                   double t1);

/// Throws std::invalid_argument if a parent is not strictly earlier or its lag is outside (0, dt_max).
void validate_parents(const NetworkState& net, const EventSequence& seq, const ParentAssignment& parents);

/// log p({s_n, c_n, z_n}). A parent over an absent edge has probability zero and
/// yields -infinity; structurally invalid parents throw.
[[nodiscard]] double augmented_loglik(const HawkesParams& params, const EventSequence& seq,
                                      const ParentAssignment& parents,
                                      IntegralMode mode = IntegralMode::exact_truncation);

} // namespace nethawkes
