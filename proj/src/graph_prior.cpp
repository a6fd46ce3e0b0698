#include "nethawkes/graph_prior.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace nethawkes {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double bernoulli_logpmf(int a, double p) {
    if (a != 0) {
        return p > 0.0 ? std::log(p) : kNegInf;
    }
    return p < 1.0 ? std::log1p(-p) : kNegInf;
}

bool counts_pair(const GraphPrior& prior, int i, int j) { return prior.allow_self_edges || i != j; }

double distance_prob(double rho, double dist, double tau) { return rho * std::exp(-dist / tau); }

// Log likelihood of the edges touching node k, for location row `x`.
double node_loglik(const GraphPrior& prior, const Eigen::MatrixXi& a, int k, const Eigen::RowVectorXd& x) {
    double acc = 0.0;
    for (int j = 0; j < prior.num_nodes; ++j) {
        if (j == k) {
            continue;
        }
        const double p = distance_prob(prior.rho, (x - prior.locations.row(j)).norm(), prior.tau);
        acc += bernoulli_logpmf(a(k, j), p) + bernoulli_logpmf(a(j, k), p);
    }
    return acc;
}

} // namespace

std::string to_string(GraphPriorKind kind) {
    switch (kind) {
    case GraphPriorKind::empty:
        return "empty";
    case GraphPriorKind::complete:
        return "complete";
    case GraphPriorKind::erdos_renyi:
        return "erdos_renyi";
    case GraphPriorKind::latent_distance:
        return "latent_distance";
    case GraphPriorKind::sbm:
        return "sbm";
    }
    return "empty";
}

GraphPriorKind graph_prior_kind_from_string(const std::string& name) {
    for (const auto k : {GraphPriorKind::empty, GraphPriorKind::complete, GraphPriorKind::erdos_renyi,
                         GraphPriorKind::latent_distance, GraphPriorKind::sbm}) {
        if (to_string(k) == name) {
            return k;
        }
    }
    throw std::invalid_argument("unknown graph prior kind '" + name + "'");
}

GraphPrior make_empty_prior(int num_nodes, bool allow_self_edges) {
    GraphPrior p;
    p.kind = GraphPriorKind::empty;
    p.num_nodes = num_nodes;
    p.allow_self_edges = allow_self_edges;
    p.rho = 0.0;
    p.resample_rho = false;
    return p;
}

GraphPrior make_complete_prior(int num_nodes, bool allow_self_edges) {
    GraphPrior p;
    p.kind = GraphPriorKind::complete;
    p.num_nodes = num_nodes;
    p.allow_self_edges = allow_self_edges;
    p.rho = 1.0;
    p.resample_rho = false;
    return p;
}

GraphPrior make_erdos_renyi_prior(int num_nodes, double rho, BetaPrior rho_prior, bool allow_self_edges) {
    GraphPrior p;
    p.kind = GraphPriorKind::erdos_renyi;
    p.num_nodes = num_nodes;
    p.allow_self_edges = allow_self_edges;
    p.rho = rho;
    p.rho_prior = rho_prior;
    return p;
}

GraphPrior make_latent_distance_prior(int num_nodes, double rho, double tau, int dims, LogNormalPrior tau_prior,
                                      bool allow_self_edges) {
    GraphPrior p;
    p.kind = GraphPriorKind::latent_distance;
    p.num_nodes = num_nodes;
    p.allow_self_edges = allow_self_edges;
    p.rho = rho;
    p.resample_rho = false;
    p.tau = tau;
    p.tau_prior = tau_prior;
    p.locations = Eigen::MatrixXd::Zero(num_nodes, dims);
    return p;
}

GraphPrior make_sbm_prior(int num_nodes, int num_blocks, BetaPrior block_prior, double concentration,
                          bool allow_self_edges) {
    if (num_blocks < 1) {
        throw std::invalid_argument("sbm needs at least one block");
    }
    GraphPrior p;
    p.kind = GraphPriorKind::sbm;
    p.num_nodes = num_nodes;
    p.allow_self_edges = allow_self_edges;
    p.resample_rho = false;
    p.block_prior = block_prior;
    p.block_probs = Eigen::MatrixXd::Constant(num_blocks, num_blocks, block_prior.a / (block_prior.a + block_prior.b));
    p.block_labels.resize(static_cast<std::size_t>(num_nodes));
    for (int k = 0; k < num_nodes; ++k) {
        p.block_labels[static_cast<std::size_t>(k)] = k % num_blocks;
    }
    p.block_weights.assign(static_cast<std::size_t>(num_blocks), 1.0 / num_blocks);
    p.block_concentration.assign(static_cast<std::size_t>(num_blocks), concentration);
    return p;
}

void validate(const GraphPrior& prior) {
    if (prior.num_nodes < 1) {
        throw std::invalid_argument("graph prior needs at least one node");
    }
    if (!(prior.rho >= 0.0 && prior.rho <= 1.0)) {
        throw std::invalid_argument("rho must lie in [0, 1]");
    }
    if (!(prior.rho_prior.a > 0.0 && prior.rho_prior.b > 0.0)) {
        throw std::invalid_argument("rho Beta prior parameters must be positive");
    }
    if (prior.kind == GraphPriorKind::latent_distance) {
        if (!(prior.tau > 0.0) || !(prior.tau_prior.log_sd > 0.0)) {
            throw std::invalid_argument("latent distance needs tau > 0 and a positive prior sd");
        }
        if (prior.locations.rows() != prior.num_nodes || prior.locations.cols() < 1) {
            throw std::invalid_argument("latent distance locations must be K x D with D >= 1");
        }
    }
    if (prior.kind == GraphPriorKind::sbm) {
        const int j = prior.num_blocks();
        if (j < 1 || prior.block_probs.cols() != j ||
            prior.block_labels.size() != static_cast<std::size_t>(prior.num_nodes) ||
            prior.block_weights.size() != static_cast<std::size_t>(j) ||
            prior.block_concentration.size() != static_cast<std::size_t>(j)) {
            throw std::invalid_argument("sbm fields disagree on the block count");
        }
        if (!((prior.block_probs.array() >= 0.0).all() && (prior.block_probs.array() <= 1.0).all())) {
            throw std::invalid_argument("sbm block probabilities must lie in [0, 1]");
        }
        for (const int b : prior.block_labels) {
            if (b < 0 || b >= j) {
                throw std::invalid_argument("sbm block label out of range");
            }
        }
        for (const double c : prior.block_concentration) {
            if (!(c > 0.0)) {
                throw std::invalid_argument("sbm concentration must be positive");
            }
        }
        if (!(prior.block_prior.a > 0.0 && prior.block_prior.b > 0.0)) {
            throw std::invalid_argument("sbm Beta prior parameters must be positive");
        }
    }
}

double edge_prob(const GraphPrior& prior, int from, int to) {
    if (from == to && !prior.allow_self_edges) {
        return 0.0;
    }
    switch (prior.kind) {
    case GraphPriorKind::empty:
        return 0.0;
    case GraphPriorKind::complete:
        return 1.0;
    case GraphPriorKind::erdos_renyi:
        return prior.rho;
    case GraphPriorKind::latent_distance:
        return distance_prob(prior.rho, (prior.locations.row(from) - prior.locations.row(to)).norm(), prior.tau);
    case GraphPriorKind::sbm:
        return prior.block_probs(prior.block_labels[static_cast<std::size_t>(from)],
                                 prior.block_labels[static_cast<std::size_t>(to)]);
    }
    return 0.0;
}

Eigen::MatrixXd edge_prob_matrix(const GraphPrior& prior) {
    Eigen::MatrixXd p(prior.num_nodes, prior.num_nodes);
    for (int i = 0; i < prior.num_nodes; ++i) {
        for (int j = 0; j < prior.num_nodes; ++j) {
            p(i, j) = edge_prob(prior, i, j);
        }
    }
    return p;
}

Eigen::MatrixXi sample_graph(const GraphPrior& prior, Rng& rng) {
    Eigen::MatrixXi a = Eigen::MatrixXi::Zero(prior.num_nodes, prior.num_nodes);
    for (int i = 0; i < prior.num_nodes; ++i) {
        for (int j = 0; j < prior.num_nodes; ++j) {
            const double p = edge_prob(prior, i, j);
            a(i, j) = (p >= 1.0 || (p > 0.0 && sample_uniform(rng) < p)) ? 1 : 0;
        }
    }
    return a;
}

long possible_edges(int num_nodes, bool allow_self_edges) {
    const long k = num_nodes;
    return allow_self_edges ? k * k : k * (k - 1);
}

long count_edges(const Eigen::MatrixXi& adjacency, bool allow_self_edges) {
    long n = 0;
    for (Eigen::Index i = 0; i < adjacency.rows(); ++i) {
        for (Eigen::Index j = 0; j < adjacency.cols(); ++j) {
            if ((allow_self_edges || i != j) && adjacency(i, j) != 0) {
                ++n;
            }
        }
    }
    return n;
}

BetaPrior rho_posterior(const GraphPrior& prior, const Eigen::MatrixXi& adjacency) {
    const long edges = count_edges(adjacency, prior.allow_self_edges);
    const long possible = possible_edges(prior.num_nodes, prior.allow_self_edges);
    return {prior.rho_prior.a + static_cast<double>(edges), prior.rho_prior.b + static_cast<double>(possible - edges)};
}

GraphPrior resample_rho(const GraphPrior& prior, const Eigen::MatrixXi& adjacency, Rng& rng) {
    if (prior.kind != GraphPriorKind::erdos_renyi) {
        throw std::invalid_argument("resample_rho needs an erdos_renyi prior");
    }
    const auto post = rho_posterior(prior, adjacency);
    GraphPrior out = prior;
    out.rho = sample_beta(rng, post.a, post.b);
    return out;
}

double latent_distance_loglik(const GraphPrior& prior, const Eigen::MatrixXi& adjacency) {
    double acc = 0.0;
    for (int i = 0; i < prior.num_nodes; ++i) {
        for (int j = 0; j < prior.num_nodes; ++j) {
            if (i != j) {
                acc += bernoulli_logpmf(adjacency(i, j), edge_prob(prior, i, j));
            }
        }
    }
    return acc;
}

GraphPrior resample_distance_hypers(const GraphPrior& prior, const Eigen::MatrixXi& adjacency, Rng& rng,
                                    DistanceUpdateStats* stats) {
    if (prior.kind != GraphPriorKind::latent_distance) {
        throw std::invalid_argument("resample_distance_hypers needs a latent_distance prior");
    }
    GraphPrior out = prior;
    auto log_post_logtau = [&](double u) {
        GraphPrior probe = out;
        probe.tau = std::exp(u);
        const double z = (u - prior.tau_prior.log_mean) / prior.tau_prior.log_sd;
        return latent_distance_loglik(probe, adjacency) - 0.5 * z * z;
    };
    out.tau = std::exp(slice_sample(rng, std::log(out.tau), log_post_logtau, out.tau_slice_width));

    for (int k = 0; k < out.num_nodes; ++k) {
        const Eigen::RowVectorXd current = out.locations.row(k);
        Eigen::RowVectorXd proposal = current;
        for (Eigen::Index d = 0; d < proposal.size(); ++d) {
            proposal(d) += sample_normal(rng, 0.0, out.location_proposal_sd);
        }
        const double log_ratio = node_loglik(out, adjacency, k, proposal) - 0.5 * proposal.squaredNorm() -
                                 node_loglik(out, adjacency, k, current) + 0.5 * current.squaredNorm();
        if (stats != nullptr) {
            ++stats->proposals;
        }
        if (std::log(sample_uniform(rng)) < log_ratio) {
            out.locations.row(k) = proposal;
            if (stats != nullptr) {
                ++stats->accepted;
            }
        }
    }
    return out;
}

GraphPrior resample_sbm(const GraphPrior& prior, const Eigen::MatrixXi& adjacency, Rng& rng) {
    if (prior.kind != GraphPriorKind::sbm) {
        throw std::invalid_argument("resample_sbm needs an sbm prior");
    }
    GraphPrior out = prior;
    const int j_count = out.num_blocks();
    const int k_count = out.num_nodes;
    auto label = [&](int k) { return out.block_labels[static_cast<std::size_t>(k)]; };

    Eigen::MatrixXd edges = Eigen::MatrixXd::Zero(j_count, j_count);
    Eigen::MatrixXd pairs = Eigen::MatrixXd::Zero(j_count, j_count);
    for (int i = 0; i < k_count; ++i) {
        for (int j = 0; j < k_count; ++j) {
            if (!counts_pair(out, i, j)) {
                continue;
            }
            pairs(label(i), label(j)) += 1.0;
            edges(label(i), label(j)) += adjacency(i, j) != 0 ? 1.0 : 0.0;
        }
    }
    for (int a = 0; a < j_count; ++a) {
        for (int b = 0; b < j_count; ++b) {
            out.block_probs(a, b) = sample_beta(rng, out.block_prior.a + edges(a, b),
                                                out.block_prior.b + pairs(a, b) - edges(a, b));
        }
    }

    std::vector<double> logp(static_cast<std::size_t>(j_count));
    for (int k = 0; k < k_count; ++k) {
        for (int c = 0; c < j_count; ++c) {
            const double w = out.block_weights[static_cast<std::size_t>(c)];
            double acc = w > 0.0 ? std::log(w) : kNegInf;
            for (int other = 0; other < k_count && std::isfinite(acc); ++other) {
                if (other == k) {
                    if (out.allow_self_edges) {
                        acc += bernoulli_logpmf(adjacency(k, k), out.block_probs(c, c));
                    }
                    continue;
                }
                acc += bernoulli_logpmf(adjacency(k, other), out.block_probs(c, label(other)));
                acc += bernoulli_logpmf(adjacency(other, k), out.block_probs(label(other), c));
            }
            logp[static_cast<std::size_t>(c)] = acc;
        }
        out.block_labels[static_cast<std::size_t>(k)] = static_cast<int>(sample_log_categorical(rng, logp));
    }

    std::vector<double> conc = out.block_concentration;
    for (int k = 0; k < k_count; ++k) {
        conc[static_cast<std::size_t>(label(k))] += 1.0;
    }
    out.block_weights = sample_dirichlet(rng, conc);
    return out;
}

GraphPrior resample_graph_hypers(const GraphPrior& prior, const Eigen::MatrixXi& adjacency, Rng& rng) {
    switch (prior.kind) {
    case GraphPriorKind::erdos_renyi:
        return prior.resample_rho ? resample_rho(prior, adjacency, rng) : prior;
    case GraphPriorKind::latent_distance:
        return resample_distance_hypers(prior, adjacency, rng);
    case GraphPriorKind::sbm:
        return resample_sbm(prior, adjacency, rng);
    default:
        return prior;
    }
}

GraphPrior sample_prior_hypers(const GraphPrior& prior, Rng& rng) {
    GraphPrior out = prior;
    switch (prior.kind) {
    case GraphPriorKind::erdos_renyi:
        if (prior.resample_rho) {
            out.rho = sample_beta(rng, prior.rho_prior.a, prior.rho_prior.b);
        }
        break;
    case GraphPriorKind::latent_distance:
        out.tau = std::exp(sample_normal(rng, prior.tau_prior.log_mean, prior.tau_prior.log_sd));
        for (Eigen::Index i = 0; i < out.locations.rows(); ++i) {
            for (Eigen::Index d = 0; d < out.locations.cols(); ++d) {
                out.locations(i, d) = sample_normal(rng, 0.0, 1.0);
            }
        }
        break;
    case GraphPriorKind::sbm: {
        out.block_weights = sample_dirichlet(rng, prior.block_concentration);
        for (auto& b : out.block_labels) {
            b = static_cast<int>(sample_categorical(rng, out.block_weights));
        }
        for (int a = 0; a < out.num_blocks(); ++a) {
            for (int b = 0; b < out.num_blocks(); ++b) {
                out.block_probs(a, b) = sample_beta(rng, prior.block_prior.a, prior.block_prior.b);
            }
        }
        break;
    }
    default:
        break;
    }
    return out;
}

} // namespace nethawkes
