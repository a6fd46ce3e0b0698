#pragma once

#include "nethawkes/background.hpp"
#include "nethawkes/graph_prior.hpp"
#include "nethawkes/model.hpp"
#include "nethawkes/random.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <vector>

namespace nethawkes {

/// W ~ Gamma(alpha, beta), shape/rate.
struct WeightPrior {
    double alpha{2.0};
    double beta{5.0};
};

/// Normal-gamma prior on the logit-space impulse location and precision.
struct ImpulsePrior {
    double mu0{-1.0};
    double kappa0{10.0};
    double alpha0{10.0};
    double beta0{1.0};
};

struct NormalGammaParams {
    double mu;
    double kappa;
    double alpha;
    double beta;
};

/// Unobserved process identities: each of `num_labels` observed labels belongs to one of
/// `num_clusters` processes, uniformly a priori.
struct ClusterModel {
    int num_labels{1};
    int num_clusters{1};
    std::vector<int> assignment;
};

/// One full draw of the latent state.
struct ChainSample {
    long iteration{0};
    NetworkState network;
    BackgroundModel background;
    ParentAssignment parents;
    GraphPrior graph_prior;
    double beta_w0{1.0};
    std::vector<int> process_map;
    double loglik{0.0};
};

struct GibbsConfig {
    WeightPrior weight_prior;
    ImpulsePrior impulse_prior;
    GraphPrior graph_prior;
    /// Starting background; its priors are the ones used by the sampler.
    BackgroundModel background;
    double dt_max{1.0};
    bool allow_self_edges{false};
    IntegralMode integral_mode{IntegralMode::full_mass};
    bool resample_beta_w0{true};
    bool resample_graph_hypers{true};
    /// LGCP offset/scale priors are calibrated from the data at initialization.
    bool calibrate_background{true};
    int ess_sweeps{1};
    std::optional<ClusterModel> clusters;
    std::uint64_t seed{0};
};

/// Posterior conjugate parameters for each weight, given parents. Entries with A = 0 hold the prior.
struct WeightPosterior {
    Eigen::MatrixXd shape;
    Eigen::MatrixXd rate;
};

[[nodiscard]] NormalGammaParams impulse_posterior(const ImpulsePrior& prior, std::span<const double> logit_lags);
[[nodiscard]] ImpulseParams sample_normal_gamma(const NormalGammaParams& ng, double dt_max, Rng& rng);

/// log(dt) - log(dt_max - dt).
[[nodiscard]] double logit_lag(double lag, double dt_max);

/// Candidates for event n's parent and their unnormalized probabilities; the
/// background is candidate kBackgroundParent.
struct ParentConditional {
    std::vector<int> candidates;
    std::vector<double> weights;
};

[[nodiscard]] ParentConditional parent_conditional(const HawkesParams& params, const EventSequence& seq,
                                                   std::span<const std::size_t> window_starts, std::size_t n);

[[nodiscard]] ParentAssignment resample_parents(const HawkesParams& params, const EventSequence& seq, Rng& rng);

/// Number of children on k' attributed to events on k.
[[nodiscard]] Eigen::MatrixXd child_counts(const EventSequence& seq, const ParentAssignment& parents, int num_processes);

[[nodiscard]] WeightPosterior weight_posterior(const EventSequence& seq, const ParentAssignment& parents,
                                               const NetworkState& network, const WeightPrior& prior,
                                               IntegralMode mode);
[[nodiscard]] Eigen::MatrixXd resample_weights(const EventSequence& seq, const ParentAssignment& parents,
                                               const NetworkState& network, const WeightPrior& prior, Rng& rng,
                                               IntegralMode mode = IntegralMode::full_mass);

/// Logit lags of all parented pairs on each edge, row-major by (parent process, child process).
[[nodiscard]] std::vector<std::vector<double>> edge_logit_lags(const EventSequence& seq,
                                                               const ParentAssignment& parents, int num_processes,
                                                               double dt_max);

/// Normal-gamma draw per edge; edges without A draw from the prior. In exact_truncation
/// mode the draw is a Metropolis independence proposal corrected for the end-of-window mass.
[[nodiscard]] NetworkState resample_impulse_params(const EventSequence& seq, const ParentAssignment& parents,
                                                   const NetworkState& network, const ImpulsePrior& prior, Rng& rng,
                                                   IntegralMode mode = IntegralMode::full_mass);

/// Log posterior odds of A(k, k') = 1 against 0 with parents marginalized; the
/// graph prior enters through logit(edge_prob). Infinite when the prior pins the entry.
[[nodiscard]] double adjacency_log_odds(const HawkesParams& params, const EventSequence& seq,
                                        const GraphPrior& prior, int from, int to,
                                        IntegralMode mode = IntegralMode::full_mass);

/// Column by column collapsed Gibbs on A, columns independent and run in parallel.
[[nodiscard]] Eigen::MatrixXi resample_adjacency(const HawkesParams& params, const EventSequence& seq,
                                                 const GraphPrior& prior, Rng& rng,
                                                 IntegralMode mode = IntegralMode::full_mass);

[[nodiscard]] GammaPrior beta_w0_posterior(const Eigen::MatrixXd& weights, double alpha_w0);
/// Throws DegenerateError when every weight is zero.
[[nodiscard]] double resample_beta_w0(const Eigen::MatrixXd& weights, double alpha_w0, Rng& rng);

/// Per process lists of background-attributed event times.
[[nodiscard]] std::vector<std::vector<double>> background_event_times(const EventSequence& seq,
                                                                      const ParentAssignment& parents);

[[nodiscard]] BackgroundModel resample_background(const BackgroundModel& model, const EventSequence& seq,
                                                  const ParentAssignment& parents, Rng& rng,
                                                  const LgcpGridPrior* lgcp_prior = nullptr, int ess_sweeps = 1);

/// Sequentially resamples each label's cluster from its collapsed conditional.
/// `labelled` carries one process per observed label.
[[nodiscard]] ClusterModel resample_process_ids(const HawkesParams& params, const EventSequence& labelled,
                                                const ClusterModel& clusters, Rng& rng,
                                                IntegralMode mode = IntegralMode::full_mass);

class GibbsSampler {
public:
    GibbsSampler(EventSequence data, GibbsConfig config);
    /// Continues from a previously emitted sample; iteration numbering resumes after it.
    GibbsSampler(EventSequence data, GibbsConfig config, ChainSample resume_from);

    [[nodiscard]] const ChainSample& state() const noexcept { return state_; }
    /// The sequence the network is fit to (relabelled through the cluster map when identities are latent).
    [[nodiscard]] const EventSequence& working_sequence() const noexcept { return working_; }

    /// One full sweep. Every iteration draws from its own substream of the seed, so
    /// resuming from an emitted sample reproduces an uninterrupted run exactly.
    const ChainSample& step();

private:
    void rebuild_working();
    [[nodiscard]] HawkesParams params() const;

    EventSequence data_;
    EventSequence working_;
    GibbsConfig config_;
    ChainSample state_;
    std::unique_ptr<LgcpGridPrior> lgcp_prior_;
};

/// Runs `iterations` sweeps, handing every sample to `sink`.
void run_chain(const EventSequence& data, const GibbsConfig& config, long iterations,
               const std::function<void(const ChainSample&)>& sink);

/// Convenience: collects the whole chain.
[[nodiscard]] std::vector<ChainSample> run_chain(const EventSequence& data, const GibbsConfig& config,
                                                 long iterations);

} // namespace nethawkes
