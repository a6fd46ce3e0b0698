#include "nethawkes/evaluation.hpp"

#include "nethawkes/errors.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace nethawkes {

namespace {

template <typename F>
Eigen::MatrixXd kept_mean(const std::vector<ChainSample>& chain, std::size_t burn_in, F value) {
    if (burn_in >= chain.size()) {
        throw std::invalid_argument("no samples remain after burn-in");
    }
    Eigen::MatrixXd acc = value(chain[burn_in]);
    for (std::size_t i = burn_in + 1; i < chain.size(); ++i) {
        acc += value(chain[i]);
    }
    return acc / static_cast<double>(chain.size() - burn_in);
}

} // namespace

Eigen::MatrixXd edge_posterior(const std::vector<ChainSample>& chain, std::size_t burn_in) {
    return kept_mean(chain, burn_in, [](const ChainSample& s) { return Eigen::MatrixXd(s.network.adjacency.cast<double>()); });
}

Eigen::MatrixXd interaction_posterior_mean(const std::vector<ChainSample>& chain, std::size_t burn_in) {
    return kept_mean(chain, burn_in, [](const ChainSample& s) {
        return Eigen::MatrixXd(s.network.adjacency.cast<double>().cwiseProduct(s.network.weights));
    });
}

Eigen::MatrixXd weight_posterior_mean(const std::vector<ChainSample>& chain, std::size_t burn_in) {
    return kept_mean(chain, burn_in, [](const ChainSample& s) { return s.network.weights; });
}

RocCurve roc_from_scores(const Eigen::MatrixXd& scores, const Eigen::MatrixXi& truth, bool exclude_diagonal) {
    if (scores.rows() != truth.rows() || scores.cols() != truth.cols()) {
        throw std::invalid_argument("scores and truth must have the same shape");
    }
    std::vector<std::pair<double, int>> items;
    for (Eigen::Index i = 0; i < scores.rows(); ++i) {
        for (Eigen::Index j = 0; j < scores.cols(); ++j) {
            if (exclude_diagonal && i == j) {
                continue;
            }
            items.emplace_back(scores(i, j), truth(i, j) != 0 ? 1 : 0);
        }
    }
    const auto positives = std::count_if(items.begin(), items.end(), [](const auto& p) { return p.second == 1; });
    const auto negatives = static_cast<long>(items.size()) - positives;
    if (positives == 0 || negatives == 0) {
        throw DegenerateError("ROC needs both present and absent edges in the truth");
    }
    std::stable_sort(items.begin(), items.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
    RocCurve roc;
    roc.thresholds.push_back(std::numeric_limits<double>::infinity());
    roc.tpr.push_back(0.0);
    roc.fpr.push_back(0.0);
    long tp = 0;
    long fp = 0;
    for (std::size_t i = 0; i < items.size();) {
        const double threshold = items[i].first;
        while (i < items.size() && items[i].first == threshold) {
            (items[i].second == 1 ? tp : fp) += 1;
            ++i;
        }
        const double tpr = static_cast<double>(tp) / static_cast<double>(positives);
        const double fpr = static_cast<double>(fp) / static_cast<double>(negatives);
        roc.auc += 0.5 * (fpr - roc.fpr.back()) * (tpr + roc.tpr.back());
        roc.thresholds.push_back(threshold);
        roc.tpr.push_back(tpr);
        roc.fpr.push_back(fpr);
    }
    return roc;
}

Eigen::MatrixXd cross_correlation_scores(const BinnedCounts& binned, int max_lag_bins) {
    if (max_lag_bins < 0) {
        throw std::invalid_argument("max_lag_bins must be nonnegative");
    }
    const Eigen::MatrixXd c = binned.counts.cast<double>();
    const auto k = c.rows();
    const auto m = c.cols();
    Eigen::MatrixXd scores = Eigen::MatrixXd::Zero(k, k);
    for (Eigen::Index lag = 0; lag <= max_lag_bins && lag < m; ++lag) {
        // sum_t c(i, t) c(j, t + lag) for every pair at once.
        scores += c.leftCols(m - lag) * c.rightCols(m - lag).transpose();
    }
    return scores;
}

std::vector<double> baseline_rates(const EventSequence& train) {
    const auto counts = train.counts_per_process();
    std::vector<double> rates(counts.size());
    for (std::size_t k = 0; k < counts.size(); ++k) {
        rates[k] = (static_cast<double>(counts[k]) + 1.0) / train.horizon();
    }
    return rates;
}

double poisson_loglik(const EventSequence& test, const std::vector<double>& rates) {
    if (static_cast<int>(rates.size()) != test.num_processes()) {
        throw std::invalid_argument("one baseline rate per process is required");
    }
    double ll = 0.0;
    for (const auto& ev : test.events()) {
        ll += std::log(rates[static_cast<std::size_t>(ev.process)]);
    }
    for (const double r : rates) {
        ll -= r * test.horizon();
    }
    return ll;
}

double predictive_model_loglik(const std::vector<ChainSample>& chain, std::size_t burn_in,
                               const EventSequence& train, const EventSequence& test) {
    if (burn_in >= chain.size()) {
        throw std::invalid_argument("no samples remain after burn-in");
    }
    if (train.num_processes() != test.num_processes()) {
        throw std::invalid_argument("train and test sequences disagree on K");
    }
    const double t_split = train.horizon();
    const double horizon = t_split + test.horizon();
    std::vector<Event> joined(train.events().begin(), train.events().end());
    for (const auto& ev : test.events()) {
        joined.push_back({ev.time + t_split, ev.process});
    }
    const EventSequence full(std::move(joined), horizon, train.num_processes());

    const std::size_t kept = chain.size() - burn_in;
    std::vector<double> values(kept);
#pragma omp parallel for schedule(dynamic)
    for (std::size_t i = 0; i < kept; ++i) {
        const auto& s = chain[burn_in + i];
        const HawkesParams params{s.network, extend_background(s.background, horizon)};
        values[i] = window_loglik(params, full, t_split, horizon);
    }
    return log_sum_exp(values) - std::log(static_cast<double>(kept));
}

PredLikReport predictive_log_lik(const std::vector<ChainSample>& chain, std::size_t burn_in,
                                 const EventSequence& train, const EventSequence& test) {
    if (test.empty()) {
        throw DegenerateError("bits per spike is undefined without test events");
    }
    PredLikReport r;
    r.model_ll = predictive_model_loglik(chain, burn_in, train, test);
    r.baseline_ll = poisson_loglik(test, baseline_rates(train));
    r.num_test_events = static_cast<long>(test.size());
    r.bits_per_spike = (r.model_ll - r.baseline_ll) / (static_cast<double>(r.num_test_events) * std::log(2.0));
    return r;
}

std::string format_report_row(const std::string& name, const std::vector<double>& values) {
    if (values.empty()) {
        throw std::invalid_argument("format_report_row needs at least one value");
    }
    const double n = static_cast<double>(values.size());
    const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
    double se = 0.0;
    if (values.size() > 1) {
        double ss = 0.0;
        for (const double v : values) {
            ss += (v - mean) * (v - mean);
        }
        se = std::sqrt(ss / (n - 1.0) / n);
    }
    std::ostringstream out;
    out << name << ' ' << std::fixed << std::setprecision(3) << mean << " ± " << se;
    return out.str();
}

} // namespace nethawkes
