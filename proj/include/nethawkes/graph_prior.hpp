#pragma once

#include "nethawkes/background.hpp"
#include "nethawkes/random.hpp"

#include <Eigen/Core>

#include <string>
#include <vector>

namespace nethawkes {

enum class GraphPriorKind { empty, complete, erdos_renyi, latent_distance, sbm };

struct BetaPrior {
    double a{1.0};
    double b{1.0};
};

/// Exchangeable prior over the directed adjacency matrix.
///
/// erdos_renyi:     Pr(A = 1) = rho, rho ~ Beta(rho_prior) when resample_rho is set.
/// latent_distance: Pr(A = 1) = rho exp(-||x_k - x_k'|| / tau), x ~ N(0, I), tau log-normal; rho fixed.
/// sbm:             Pr(A = 1) = B(b_k, b_k'), B ~ Beta(block_prior), b_k ~ Cat(block_weights),
///                  block_weights ~ Dirichlet(block_concentration).
struct GraphPrior {
    GraphPriorKind kind{GraphPriorKind::erdos_renyi};
    int num_nodes{1};
    bool allow_self_edges{false};

    double rho{0.5};
    BetaPrior rho_prior;
    bool resample_rho{true};

    Eigen::MatrixXd locations;  // K x D
    double tau{1.0};
    LogNormalPrior tau_prior{0.0, 1.0};
    double location_proposal_sd{0.3};
    double tau_slice_width{1.0};

    Eigen::MatrixXd block_probs;  // J x J
    BetaPrior block_prior;
    std::vector<int> block_labels;
    std::vector<double> block_weights;
    std::vector<double> block_concentration;

    [[nodiscard]] int num_blocks() const { return static_cast<int>(block_probs.rows()); }
};

[[nodiscard]] std::string to_string(GraphPriorKind kind);
/// Throws std::invalid_argument on an unknown name.
[[nodiscard]] GraphPriorKind graph_prior_kind_from_string(const std::string& name);

[[nodiscard]] GraphPrior make_empty_prior(int num_nodes, bool allow_self_edges = false);
[[nodiscard]] GraphPrior make_complete_prior(int num_nodes, bool allow_self_edges = false);
[[nodiscard]] GraphPrior make_erdos_renyi_prior(int num_nodes, double rho, BetaPrior rho_prior = {},
                                                bool allow_self_edges = false);
/// Locations start at the origin, in `dims` dimensions.
[[nodiscard]] GraphPrior make_latent_distance_prior(int num_nodes, double rho, double tau, int dims = 2,
                                                    LogNormalPrior tau_prior = {0.0, 1.0},
                                                    bool allow_self_edges = false);
/// Labels start at k mod J, block probabilities at the Beta prior mean, weights uniform.
[[nodiscard]] GraphPrior make_sbm_prior(int num_nodes, int num_blocks, BetaPrior block_prior = {},
                                        double concentration = 1.0, bool allow_self_edges = false);

void validate(const GraphPrior& prior);

[[nodiscard]] double edge_prob(const GraphPrior& prior, int from, int to);
[[nodiscard]] Eigen::MatrixXd edge_prob_matrix(const GraphPrior& prior);
[[nodiscard]] Eigen::MatrixXi sample_graph(const GraphPrior& prior, Rng& rng);

/// K^2 with self edges, K(K - 1) without.
[[nodiscard]] long possible_edges(int num_nodes, bool allow_self_edges);
[[nodiscard]] long count_edges(const Eigen::MatrixXi& adjacency, bool allow_self_edges);

[[nodiscard]] BetaPrior rho_posterior(const GraphPrior& prior, const Eigen::MatrixXi& adjacency);
/// Throws std::invalid_argument unless the prior is erdos_renyi.
[[nodiscard]] GraphPrior resample_rho(const GraphPrior& prior, const Eigen::MatrixXi& adjacency, Rng& rng);

struct DistanceUpdateStats {
    long proposals{0};
    long accepted{0};
};

/// Bernoulli log likelihood of the adjacency under the latent distance edge probabilities.
[[nodiscard]] double latent_distance_loglik(const GraphPrior& prior, const Eigen::MatrixXi& adjacency);

/// Slice sample on log tau, then random-walk Metropolis on each location.
[[nodiscard]] GraphPrior resample_distance_hypers(const GraphPrior& prior, const Eigen::MatrixXi& adjacency,
                                                  Rng& rng, DistanceUpdateStats* stats = nullptr);

/// Block probabilities, then labels one node at a time, then block weights.
[[nodiscard]] GraphPrior resample_sbm(const GraphPrior& prior, const Eigen::MatrixXi& adjacency, Rng& rng);

/// Dispatches on kind; empty and complete priors are returned unchanged.
[[nodiscard]] GraphPrior resample_graph_hypers(const GraphPrior& prior, const Eigen::MatrixXi& adjacency,
                                               Rng& rng);

/// Draws every resampled hyperparameter from its prior.
[[nodiscard]] GraphPrior sample_prior_hypers(const GraphPrior& prior, Rng& rng);

} // namespace nethawkes
