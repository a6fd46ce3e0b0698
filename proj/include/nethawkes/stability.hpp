#pragma once

#include "nethawkes/random.hpp"

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <vector>

namespace nethawkes {

/// Weight distribution Gamma(alpha, beta) masked by Bernoulli(rho) edges on K nodes,
/// summarized by the mean and sd of a single masked entry.
struct StabilitySpec {
    int num_nodes{1};
    double alpha{1.0};
    double beta{1.0};
    double rho{0.0};
    double mu_eff{0.0};
    double sigma_eff{0.0};
};

[[nodiscard]] StabilitySpec make_stability_spec(int num_nodes, double alpha, double beta, double rho);

/// max |eig(M)|. Dense eigensolver for K <= 512 or any negative entry, power iteration otherwise.
[[nodiscard]] double spectral_radius(const Eigen::MatrixXd& m);
[[nodiscard]] double spectral_radius(const Eigen::MatrixXi& adjacency, const Eigen::MatrixXd& weights);

/// Perron root of a nonnegative sparse matrix by power iteration on M + I.
[[nodiscard]] double perron_root(const Eigen::SparseMatrix<double>& m, double tol = 1e-10,
                                 int max_iterations = 100000);

struct MaxEigPrediction {
    double mean{0.0};
    double sd{0.0};
    double bulk_radius{0.0};
};

/// Outlier eigenvalue ~ Normal(mu_eff K, sigma_eff^2); bulk inside radius sigma_eff sqrt(K).
[[nodiscard]] MaxEigPrediction theoretical_max_eig(const StabilitySpec& spec);

/// min(sigma sqrt(K), mu K + c sigma).
[[nodiscard]] double stability_criterion(const StabilitySpec& spec, double confidence_sigmas = 3.0);

/// Largest rho with stability_criterion <= 1, by bisection.
[[nodiscard]] double max_stable_rho(double alpha, double beta, int num_nodes, double confidence_sigmas = 3.0);

/// Largest rho with max(sigma sqrt(K), mu K + c sigma) <= 1: outlier and bulk both inside the unit disc.
[[nodiscard]] double conservative_stable_rho(double alpha, double beta, int num_nodes,
                                             double confidence_sigmas = 3.0);

/// Pr(max eig > 1) under the Normal outlier law.
[[nodiscard]] double predicted_instability(const StabilitySpec& spec);

/// Spectral radii of `num_draws` random A (.) W draws, one substream per draw.
[[nodiscard]] std::vector<double> empirical_eig_distribution(const StabilitySpec& spec, int num_draws, Rng& rng);

struct EigSummary {
    double mean{0.0};
    double sd{0.0};
    /// Empirical variance over sigma_eff^2.
    double variance_ratio{0.0};
    double fraction_unstable{0.0};
    /// Kolmogorov-Smirnov distance to Normal(mu_eff K, sigma_eff^2).
    double ks_distance{0.0};
};

[[nodiscard]] EigSummary summarize_eigs(const std::vector<double>& radii, const StabilitySpec& spec);

} // namespace nethawkes
