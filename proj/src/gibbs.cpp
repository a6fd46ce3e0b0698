#include "nethawkes/gibbs.hpp"

#include "nethawkes/errors.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace nethawkes {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr std::size_t kParentBlock = 256;

void rethrow_first(const std::vector<std::exception_ptr>& errors) {
    for (const auto& e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
}

// Expected children of an event at s on `to` per unit weight.
double unit_mass(const NetworkState& net, int from, int to, double s, double horizon, IntegralMode mode) {
    if (mode == IntegralMode::full_mass || horizon - s >= net.dt_max) {
        return 1.0;
    }
    return impulse_cdf(horizon - s, net.impulse(from, to));
}

// Everything the collapsed update of column `to` needs, with weights factored out.
struct ColumnTerms {
    std::vector<double> background;  // per event on `to`
    Eigen::MatrixXd excitation;      // events on `to` x source process: sum of g over the window
    std::vector<double> exposure;    // per source process: summed unit mass
};

ColumnTerms column_terms(const HawkesParams& params, const EventSequence& seq,
                         std::span<const std::size_t> starts, int to, IntegralMode mode) {
    const auto& net = params.network;
    const int num_k = net.size();
    ColumnTerms terms;
    terms.exposure.assign(static_cast<std::size_t>(num_k), 0.0);
    std::vector<std::size_t> targets;
    for (std::size_t n = 0; n < seq.size(); ++n) {
        const auto& ev = seq[n];
        terms.exposure[static_cast<std::size_t>(ev.process)] +=
            unit_mass(net, ev.process, to, ev.time, seq.horizon(), mode);
        if (ev.process == to) {
            targets.push_back(n);
        }
    }
    terms.background.resize(targets.size());
    terms.excitation = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(targets.size()), num_k);
    for (std::size_t i = 0; i < targets.size(); ++i) {
        const std::size_t n = targets[i];
        const auto& ev = seq[n];
        terms.background[i] = background_rate(params.background, to, ev.time);
        for (std::size_t m = starts[n]; m < n; ++m) {
            const auto& p = seq[m];
            const double lag = ev.time - p.time;
            if (lag > 0.0) {
                terms.excitation(static_cast<Eigen::Index>(i), p.process) +=
                    impulse_density(lag, net.impulse(p.process, to));
            }
        }
    }
    return terms;
}

// Column log likelihood terms that depend on A(from, to), with `present` toggled.
double column_loglik(const ColumnTerms& terms, const NetworkState& net, const Eigen::MatrixXi& adjacency, int to,
                     int from, bool present) {
    const int num_k = net.size();
    double acc = 0.0;
    for (std::size_t i = 0; i < terms.background.size(); ++i) {
        double rate = terms.background[i];
        for (int k = 0; k < num_k; ++k) {
            const bool on = k == from ? present : adjacency(k, to) != 0;
            if (on) {
                rate += net.weights(k, to) * terms.excitation(static_cast<Eigen::Index>(i), k);
            }
        }
        if (!(rate > 0.0)) {
            return kNegInf;
        }
        acc += std::log(rate);
    }
    if (present) {
        acc -= net.weights(from, to) * terms.exposure[static_cast<std::size_t>(from)];
    }
    return acc;
}

double log_odds_from(double ll1, double ll0, double p) {
    if (p <= 0.0) {
        return kNegInf;
    }
    if (p >= 1.0) {
        return std::numeric_limits<double>::infinity();
    }
    const double prior = std::log(p) - std::log1p(-p);
    if (ll1 == kNegInf && ll0 == kNegInf) {
        return prior;
    }
    return (ll1 - ll0) + prior;
}

bool draw_from_log_odds(double log_odds, Rng& rng) {
    if (log_odds == kNegInf) {
        return false;
    }
    if (log_odds == std::numeric_limits<double>::infinity()) {
        return true;
    }
    // Draw u even when the answer is nearly certain so the stream consumption is fixed.
    const double u = sample_uniform(rng);
    const double p = log_odds >= 0.0 ? 1.0 / (1.0 + std::exp(-log_odds))
                                     : std::exp(log_odds) / (1.0 + std::exp(log_odds));
    return u < p;
}

} // namespace

double logit_lag(double lag, double dt_max) { return std::log(lag) - std::log(dt_max - lag); }

NormalGammaParams impulse_posterior(const ImpulsePrior& prior, std::span<const double> x) {
    const double m = static_cast<double>(x.size());
    if (x.empty()) {
        return {prior.mu0, prior.kappa0, prior.alpha0, prior.beta0};
    }
    const double mean = std::accumulate(x.begin(), x.end(), 0.0) / m;
    double ss = 0.0;
    for (const double v : x) {
        ss += (v - mean) * (v - mean);
    }
    const double kappa = prior.kappa0 + m;
    return {(prior.kappa0 * prior.mu0 + m * mean) / kappa, kappa, prior.alpha0 + 0.5 * m,
            prior.beta0 + 0.5 * ss + prior.kappa0 * m * (mean - prior.mu0) * (mean - prior.mu0) / (2.0 * kappa)};
}

ImpulseParams sample_normal_gamma(const NormalGammaParams& ng, double dt_max, Rng& rng) {
    const double tau = sample_gamma(rng, ng.alpha, ng.beta);
    const double mu = sample_normal(rng, ng.mu, 1.0 / std::sqrt(ng.kappa * tau));
    return {mu, tau, dt_max};
}

ParentConditional parent_conditional(const HawkesParams& params, const EventSequence& seq,
                                     std::span<const std::size_t> starts, std::size_t n) {
    const auto& net = params.network;
    const auto& ev = seq[n];
    ParentConditional out;
    out.candidates.push_back(kBackgroundParent);
    out.weights.push_back(background_rate(params.background, ev.process, ev.time));
    for (std::size_t m = starts[n]; m < n; ++m) {
        const auto& p = seq[m];
        const double lag = ev.time - p.time;
        const double w = net.strength(p.process, ev.process);
        if (lag > 0.0 && lag < net.dt_max && w > 0.0) {
            const double g = impulse_density(lag, net.impulse(p.process, ev.process));
            if (g > 0.0) {
                out.candidates.push_back(static_cast<int>(m));
                out.weights.push_back(w * g);
            }
        }
    }
    return out;
}

ParentAssignment resample_parents(const HawkesParams& params, const EventSequence& seq, Rng& rng) {
    const auto starts = history_window_starts(seq, params.network.dt_max);
    const std::uint64_t base = rng();
    ParentAssignment out;
    out.parent.assign(seq.size(), kBackgroundParent);
    const auto blocks = static_cast<long>((seq.size() + kParentBlock - 1) / kParentBlock);
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(blocks));
#pragma omp parallel for schedule(static)
    for (long b = 0; b < blocks; ++b) {
        try {
            Rng local = make_substream(base, {static_cast<std::uint64_t>(b)});
            const std::size_t lo = static_cast<std::size_t>(b) * kParentBlock;
            const std::size_t hi = std::min(seq.size(), lo + kParentBlock);
            for (std::size_t n = lo; n < hi; ++n) {
                const auto cond = parent_conditional(params, seq, starts, n);
                out.parent[n] = cond.candidates[sample_categorical(local, cond.weights)];
            }
        } catch (...) {
            errors[static_cast<std::size_t>(b)] = std::current_exception();
        }
    }
    rethrow_first(errors);
    return out;
}

Eigen::MatrixXd child_counts(const EventSequence& seq, const ParentAssignment& parents, int num_processes) {
    Eigen::MatrixXd counts = Eigen::MatrixXd::Zero(num_processes, num_processes);
    for (std::size_t n = 0; n < seq.size(); ++n) {
        const int z = parents.parent[n];
        if (z != kBackgroundParent) {
            counts(seq[static_cast<std::size_t>(z)].process, seq[n].process) += 1.0;
        }
    }
    return counts;
}

WeightPosterior weight_posterior(const EventSequence& seq, const ParentAssignment& parents,
                                 const NetworkState& network, const WeightPrior& prior, IntegralMode mode) {
    const int num_k = network.size();
    const auto children = child_counts(seq, parents, num_k);
    Eigen::MatrixXd exposure = Eigen::MatrixXd::Zero(num_k, num_k);
    for (const auto& ev : seq.events()) {
        for (int to = 0; to < num_k; ++to) {
            exposure(ev.process, to) += unit_mass(network, ev.process, to, ev.time, seq.horizon(), mode);
        }
    }
    WeightPosterior post{Eigen::MatrixXd::Constant(num_k, num_k, prior.alpha),
                         Eigen::MatrixXd::Constant(num_k, num_k, prior.beta)};
    for (int i = 0; i < num_k; ++i) {
        for (int j = 0; j < num_k; ++j) {
            if (network.adjacency(i, j) != 0) {
                post.shape(i, j) += children(i, j);
                post.rate(i, j) += exposure(i, j);
            }
        }
    }
    return post;
}

Eigen::MatrixXd resample_weights(const EventSequence& seq, const ParentAssignment& parents,
                                 const NetworkState& network, const WeightPrior& prior, Rng& rng, IntegralMode mode) {
    validate_parents(network, seq, parents);
    const auto post = weight_posterior(seq, parents, network, prior, mode);
    Eigen::MatrixXd w(network.size(), network.size());
    for (int i = 0; i < network.size(); ++i) {
        for (int j = 0; j < network.size(); ++j) {
            w(i, j) = sample_gamma(rng, post.shape(i, j), post.rate(i, j));
        }
    }
    return w;
}

std::vector<std::vector<double>> edge_logit_lags(const EventSequence& seq, const ParentAssignment& parents,
                                                 int num_processes, double dt_max) {
    std::vector<std::vector<double>> lags(static_cast<std::size_t>(num_processes) * num_processes);
    for (std::size_t n = 0; n < seq.size(); ++n) {
        const int z = parents.parent[n];
        if (z == kBackgroundParent) {
            continue;
        }
        const auto& p = seq[static_cast<std::size_t>(z)];
        const double lag = seq[n].time - p.time;
        if (!(lag > 0.0 && lag < dt_max)) {
            throw std::invalid_argument("parented pair with lag outside (0, dt_max)");
        }
        lags[static_cast<std::size_t>(p.process) * num_processes + seq[n].process].push_back(logit_lag(lag, dt_max));
    }
    return lags;
}

NetworkState resample_impulse_params(const EventSequence& seq, const ParentAssignment& parents,
                                     const NetworkState& network, const ImpulsePrior& prior, Rng& rng,
                                     IntegralMode mode) {
    const int num_k = network.size();
    const auto lags = edge_logit_lags(seq, parents, num_k, network.dt_max);
    // Residual windows T - s for events within dt_max of the end, per parent process.
    std::vector<std::vector<double>> tails(static_cast<std::size_t>(num_k));
    if (mode == IntegralMode::exact_truncation) {
        for (const auto& ev : seq.events()) {
            if (seq.horizon() - ev.time < network.dt_max) {
                tails[static_cast<std::size_t>(ev.process)].push_back(seq.horizon() - ev.time);
            }
        }
    }
    NetworkState out = network;
    for (int i = 0; i < num_k; ++i) {
        for (int j = 0; j < num_k; ++j) {
            const bool on = network.adjacency(i, j) != 0;
            const auto& x = lags[static_cast<std::size_t>(i) * num_k + j];
            const auto ng = on ? impulse_posterior(prior, x) : impulse_posterior(prior, {});
            const auto proposal = sample_normal_gamma(ng, network.dt_max, rng);
            const auto& tail = tails[static_cast<std::size_t>(i)];
            if (on && mode == IntegralMode::exact_truncation && !tail.empty() && network.weights(i, j) > 0.0) {
                const auto current = network.impulse(i, j);
                double delta = 0.0;
                for (const double r : tail) {
                    delta += impulse_cdf(r, current) - impulse_cdf(r, proposal);
                }
                const double u = sample_uniform(rng);
                if (!(std::log(u) < network.weights(i, j) * delta)) {
                    continue;
                }
            }
            out.impulse_mu(i, j) = proposal.mu;
            out.impulse_tau(i, j) = proposal.tau;
        }
    }
    return out;
}

double adjacency_log_odds(const HawkesParams& params, const EventSequence& seq, const GraphPrior& prior, int from,
                          int to, IntegralMode mode) {
    const auto starts = history_window_starts(seq, params.network.dt_max);
    const auto terms = column_terms(params, seq, starts, to, mode);
    const auto& net = params.network;
    const double ll1 = column_loglik(terms, net, net.adjacency, to, from, true);
    const double ll0 = column_loglik(terms, net, net.adjacency, to, from, false);
    return log_odds_from(ll1, ll0, edge_prob(prior, from, to));
}

Eigen::MatrixXi resample_adjacency(const HawkesParams& params, const EventSequence& seq, const GraphPrior& prior,
                                   Rng& rng, IntegralMode mode) {
    const auto& net = params.network;
    const int num_k = net.size();
    const auto starts = history_window_starts(seq, net.dt_max);
    const std::uint64_t base = rng();
    Eigen::MatrixXi out = net.adjacency;
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(num_k));
#pragma omp parallel for schedule(dynamic)
    for (int to = 0; to < num_k; ++to) {
        try {
            Rng local = make_substream(base, {static_cast<std::uint64_t>(to)});
            const auto terms = column_terms(params, seq, starts, to, mode);
            // Columns are independent: only column `to` of `out` is touched here.
            for (int from = 0; from < num_k; ++from) {
                const double p = edge_prob(prior, from, to);
                double ll1 = 0.0;
                double ll0 = 0.0;
                if (p > 0.0 && p < 1.0) {
                    ll1 = column_loglik(terms, net, out, to, from, true);
                    ll0 = column_loglik(terms, net, out, to, from, false);
                }
                out(from, to) = draw_from_log_odds(log_odds_from(ll1, ll0, p), local) ? 1 : 0;
            }
        } catch (...) {
            errors[static_cast<std::size_t>(to)] = std::current_exception();
        }
    }
    rethrow_first(errors);
    return out;
}

GammaPrior beta_w0_posterior(const Eigen::MatrixXd& weights, double alpha_w0) {
    const double total = weights.sum();
    if (!(total > 0.0)) {
        throw DegenerateError("weight scale posterior needs at least one positive weight");
    }
    return {static_cast<double>(weights.size()) * alpha_w0, total};
}

double resample_beta_w0(const Eigen::MatrixXd& weights, double alpha_w0, Rng& rng) {
    const auto post = beta_w0_posterior(weights, alpha_w0);
    return sample_gamma(rng, post.shape, post.rate);
}

std::vector<std::vector<double>> background_event_times(const EventSequence& seq, const ParentAssignment& parents) {
    std::vector<std::vector<double>> times(static_cast<std::size_t>(seq.num_processes()));
    for (std::size_t n = 0; n < seq.size(); ++n) {
        if (parents.parent[n] == kBackgroundParent) {
            times[static_cast<std::size_t>(seq[n].process)].push_back(seq[n].time);
        }
    }
    return times;
}

BackgroundModel resample_background(const BackgroundModel& model, const EventSequence& seq,
                                    const ParentAssignment& parents, Rng& rng, const LgcpGridPrior* lgcp_prior,
                                    int ess_sweeps) {
    const auto times = background_event_times(seq, parents);
    if (model.kind == BackgroundKind::constant) {
        BackgroundModel out = model;
        for (int k = 0; k < model.num_processes(); ++k) {
            out = resample_constant_rate(out, k, static_cast<long>(times[static_cast<std::size_t>(k)].size()),
                                         seq.horizon(), rng);
        }
        return out;
    }
    if (lgcp_prior != nullptr) {
        return resample_lgcp(model, times, rng, *lgcp_prior, ess_sweeps);
    }
    return resample_lgcp(model, times, rng);
}

ClusterModel resample_process_ids(const HawkesParams& params, const EventSequence& labelled,
                                  const ClusterModel& clusters, Rng& rng, IntegralMode mode) {
    if (clusters.num_clusters <= 1) {
        return clusters;
    }
    if (static_cast<int>(clusters.assignment.size()) != labelled.num_processes()) {
        throw std::invalid_argument("cluster assignment must cover every label");
    }
    ClusterModel out = clusters;
    std::vector<double> logp(static_cast<std::size_t>(clusters.num_clusters));
    for (int label = 0; label < clusters.num_labels; ++label) {
        for (int c = 0; c < clusters.num_clusters; ++c) {
            out.assignment[static_cast<std::size_t>(label)] = c;
            logp[static_cast<std::size_t>(c)] =
                marginal_loglik(params, relabel(labelled, out.assignment, clusters.num_clusters), mode);
        }
        out.assignment[static_cast<std::size_t>(label)] = static_cast<int>(sample_log_categorical(rng, logp));
    }
    return out;
}

GibbsSampler::GibbsSampler(EventSequence data, GibbsConfig config)
    : data_(std::move(data)), config_(std::move(config)) {
    const int num_k = config_.clusters ? config_.clusters->num_clusters : data_.num_processes();
    if (config_.clusters) {
        auto& cl = *config_.clusters;
        if (cl.num_labels != data_.num_processes()) {
            throw ValidationError("cluster model label count does not match the data");
        }
        if (cl.assignment.empty()) {
            cl.assignment.resize(static_cast<std::size_t>(cl.num_labels));
            for (int l = 0; l < cl.num_labels; ++l) {
                cl.assignment[static_cast<std::size_t>(l)] = l % cl.num_clusters;
            }
        }
        state_.process_map = cl.assignment;
    }
    if (config_.graph_prior.num_nodes != num_k || config_.background.num_processes() != num_k) {
        throw ValidationError("configuration has " + std::to_string(config_.graph_prior.num_nodes) +
                              " processes but the data has " + std::to_string(num_k));
    }
    rebuild_working();

    Rng rng = make_substream(config_.seed, {0});
    const auto& wp = config_.weight_prior;
    const auto& ip = config_.impulse_prior;
    state_.iteration = 0;
    state_.graph_prior = config_.graph_prior;
    state_.graph_prior.allow_self_edges = config_.allow_self_edges;
    state_.network = NetworkState::disconnected(num_k, config_.dt_max, ip.mu0, ip.alpha0 / ip.beta0,
                                                config_.allow_self_edges);
    state_.network.adjacency = sample_graph(state_.graph_prior, rng);
    state_.network.weights = Eigen::MatrixXd::Constant(num_k, num_k, wp.alpha / wp.beta);
    state_.beta_w0 = wp.beta;

    state_.background = config_.background;
    const auto counts = working_.counts_per_process();
    if (state_.background.kind == BackgroundKind::constant) {
        state_.background.horizon = working_.horizon();
        for (int k = 0; k < num_k; ++k) {
            state_.background.rates[static_cast<std::size_t>(k)] =
                static_cast<double>(std::max(counts[static_cast<std::size_t>(k)], 1L)) / working_.horizon();
        }
    } else {
        if (std::abs(state_.background.horizon - working_.horizon()) > 1e-9 * working_.horizon()) {
            throw ValidationError("LGCP grid horizon does not match the data horizon");
        }
        if (config_.calibrate_background) {
            calibrate_lgcp_priors(state_.background, counts, working_.horizon());
        }
        lgcp_prior_ = std::make_unique<LgcpGridPrior>(state_.background);
    }
    state_.parents.parent.assign(working_.size(), kBackgroundParent);
    state_.loglik = marginal_loglik(params(), working_, config_.integral_mode);
}

GibbsSampler::GibbsSampler(EventSequence data, GibbsConfig config, ChainSample resume_from)
    : data_(std::move(data)), config_(std::move(config)), state_(std::move(resume_from)) {
    if (config_.clusters) {
        config_.clusters->assignment = state_.process_map;
    }
    rebuild_working();
    validate(params());
    validate_parents(state_.network, working_, state_.parents);
    if (state_.background.kind == BackgroundKind::lgcp) {
        lgcp_prior_ = std::make_unique<LgcpGridPrior>(state_.background);
    }
}

void GibbsSampler::rebuild_working() {
    if (config_.clusters) {
        working_ = relabel(data_, state_.process_map, config_.clusters->num_clusters);
    } else {
        working_ = data_;
    }
}

HawkesParams GibbsSampler::params() const { return {state_.network, state_.background}; }

const ChainSample& GibbsSampler::step() {
    const long iteration = state_.iteration + 1;
    Rng rng = make_substream(config_.seed, {static_cast<std::uint64_t>(iteration)});
    const auto mode = config_.integral_mode;
    auto& net = state_.network;

    net.adjacency = resample_adjacency(params(), working_, state_.graph_prior, rng, mode);
    state_.parents = resample_parents(params(), working_, rng);
    net.weights = resample_weights(working_, state_.parents, net,
                                   {config_.weight_prior.alpha, state_.beta_w0}, rng, mode);
    net = resample_impulse_params(working_, state_.parents, net, config_.impulse_prior, rng, mode);
    state_.background = resample_background(state_.background, working_, state_.parents, rng, lgcp_prior_.get(),
                                            config_.ess_sweeps);
    if (config_.resample_graph_hypers) {
        state_.graph_prior = resample_graph_hypers(state_.graph_prior, net.adjacency, rng);
    }
    if (config_.resample_beta_w0) {
        state_.beta_w0 = resample_beta_w0(net.weights, config_.weight_prior.alpha, rng);
    }
    if (config_.clusters && config_.clusters->num_clusters > 1) {
        ClusterModel cl = *config_.clusters;
        cl.assignment = state_.process_map;
        cl = resample_process_ids(params(), data_, cl, rng, mode);
        state_.process_map = cl.assignment;
        rebuild_working();
        // Parents must respect the new identities before the sample is emitted.
        state_.parents = resample_parents(params(), working_, rng);
    }
    state_.iteration = iteration;
    state_.loglik = marginal_loglik(params(), working_, mode);
    if (state_.loglik == kNegInf || std::isnan(state_.loglik)) {
        throw NumericalError("iteration " + std::to_string(iteration) +
                             ": log likelihood is not finite; some event has zero intensity");
    }
    return state_;
}

void run_chain(const EventSequence& data, const GibbsConfig& config, long iterations,
               const std::function<void(const ChainSample&)>& sink) {
    if (iterations <= 0) {
        return;
    }
    GibbsSampler sampler(data, config);
    for (long i = 0; i < iterations; ++i) {
        sink(sampler.step());
    }
}

std::vector<ChainSample> run_chain(const EventSequence& data, const GibbsConfig& config, long iterations) {
    std::vector<ChainSample> chain;
    run_chain(data, config, iterations, [&](const ChainSample& s) { chain.push_back(s); });
    return chain;
}

} // namespace nethawkes
