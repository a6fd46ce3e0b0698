#pragma once

#include "nethawkes/events.hpp"
#include "nethawkes/gibbs.hpp"

#include <Eigen/Core>

#include <string>
#include <vector>

namespace nethawkes {

/// Mean of A over samples [burn_in, end). Throws std::invalid_argument when nothing is kept.
[[nodiscard]] Eigen::MatrixXd edge_posterior(const std::vector<ChainSample>& chain, std::size_t burn_in);
/// Mean of A (.) W over the kept samples.
[[nodiscard]] Eigen::MatrixXd interaction_posterior_mean(const std::vector<ChainSample>& chain, std::size_t burn_in);
/// Mean of W over the kept samples, regardless of A.
[[nodiscard]] Eigen::MatrixXd weight_posterior_mean(const std::vector<ChainSample>& chain, std::size_t burn_in);

/// ROC points ordered by decreasing threshold, starting at (0, 0).
struct RocCurve {
    std::vector<double> thresholds;
    std::vector<double> tpr;
    std::vector<double> fpr;
    double auc{0.0};
};

/// Equal scores share one threshold. Throws DegenerateError when the truth has only one class.
[[nodiscard]] RocCurve roc_from_scores(const Eigen::MatrixXd& scores, const Eigen::MatrixXi& truth,
                                       bool exclude_diagonal = true);

/// score(k, k') = sum_{m=0}^{max_lag} sum_t counts(k, t) counts(k', t + m).
[[nodiscard]] Eigen::MatrixXd cross_correlation_scores(const BinnedCounts& binned, int max_lag_bins);

struct PredLikReport {
    double model_ll{0.0};
    double baseline_ll{0.0};
    long num_test_events{0};
    double bits_per_spike{0.0};
};

/// Homogeneous Poisson rates (N_k + 1) / T fit to the training sequence.
[[nodiscard]] std::vector<double> baseline_rates(const EventSequence& train);

/// log p(test | rates) for a homogeneous Poisson process.
[[nodiscard]] double poisson_loglik(const EventSequence& test, const std::vector<double>& rates);

/// Posterior predictive log likelihood of the test window, which follows the
/// training window directly: log-mean-exp over kept samples of the likelihood of the
/// test events conditioned on the training history.
[[nodiscard]] double predictive_model_loglik(const std::vector<ChainSample>& chain, std::size_t burn_in,
                                             const EventSequence& train, const EventSequence& test);

/// Throws DegenerateError when the test window is empty.
[[nodiscard]] PredLikReport predictive_log_lik(const std::vector<ChainSample>& chain, std::size_t burn_in,
                                               const EventSequence& train, const EventSequence& test);

/// "Name 0.903 ± 0.003": mean and standard error of the values, three decimals.
[[nodiscard]] std::string format_report_row(const std::string& name, const std::vector<double>& values);

} // namespace nethawkes
