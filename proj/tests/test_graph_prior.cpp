#include "nethawkes/graph_prior.hpp"
#include "oracles.hpp"

#include <Eigen/Eigenvalues>
#include <doctest.h>

#include <numbers>
#include <numeric>

using namespace nethawkes;

namespace {

Eigen::MatrixXi planted_two_block(int k, double p_in, double p_out, Rng& rng, std::vector<int>& truth) {
    truth.assign(static_cast<std::size_t>(k), 0);
    for (int i = k / 2; i < k; ++i) {
        truth[static_cast<std::size_t>(i)] = 1;
    }
    Eigen::MatrixXi a = Eigen::MatrixXi::Zero(k, k);
    for (int i = 0; i < k; ++i) {
        for (int j = 0; j < k; ++j) {
            if (i == j) {
                continue;
            }
            const bool same = truth[static_cast<std::size_t>(i)] == truth[static_cast<std::size_t>(j)];
            a(i, j) = sample_uniform(rng) < (same ? p_in : p_out) ? 1 : 0;
        }
    }
    return a;
}

// Sign of the second eigenvector of the symmetrized adjacency.
std::vector<int> spectral_labels(const Eigen::MatrixXi& a) {
    const Eigen::MatrixXd s = (a + a.transpose()).cast<double>();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(s);
    const Eigen::VectorXd v = eig.eigenvectors().col(s.rows() - 2);
    std::vector<int> out(static_cast<std::size_t>(s.rows()));
    for (Eigen::Index i = 0; i < s.rows(); ++i) {
        out[static_cast<std::size_t>(i)] = v(i) > 0.0 ? 1 : 0;
    }
    return out;
}

double agreement(const std::vector<int>& a, const std::vector<int>& b) {
    long same = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        same += a[i] == b[i] ? 1 : 0;
    }
    const double f = static_cast<double>(same) / static_cast<double>(a.size());
    return std::max(f, 1.0 - f);
}

} // namespace

TEST_CASE("trivial priors") {
    const auto empty = make_empty_prior(4);
    const auto full = make_complete_prior(4);
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) {
            CHECK(edge_prob(empty, i, j) == 0.0);
            CHECK(edge_prob(full, i, j) == (i == j ? 0.0 : 1.0));
        }
    }
    CHECK(edge_prob(make_complete_prior(3, true), 1, 1) == 1.0);
}

TEST_CASE("latent distance edge probability") {
    auto p = make_latent_distance_prior(2, 0.2, 1.0);
    CHECK(edge_prob(p, 0, 1) == doctest::Approx(0.2));
    p.locations(1, 0) = 0.6;
    p.locations(1, 1) = 0.8;
    CHECK(edge_prob(p, 0, 1) == doctest::Approx(0.2 / std::exp(1.0)).epsilon(1e-12));
    CHECK(edge_prob(p, 0, 1) == doctest::Approx(0.07358).epsilon(1e-4));
    CHECK(edge_prob(p, 1, 1) == 0.0);
}

TEST_CASE("sbm edge probability reads the block matrix") {
    auto p = make_sbm_prior(4, 2);
    p.block_probs << 0.9, 0.1, 0.2, 0.8;
    p.block_labels = {0, 1, 1, 0};
    CHECK(edge_prob(p, 0, 1) == 0.1);
    CHECK(edge_prob(p, 1, 0) == 0.2);
    CHECK(edge_prob(p, 1, 2) == 0.8);
    CHECK(edge_prob(p, 0, 3) == 0.9);
}

TEST_CASE("edge probabilities are exchangeable") {
    Rng rng = make_substream(1, {});
    auto p = make_latent_distance_prior(6, 0.4, 0.7, 3);
    for (Eigen::Index i = 0; i < p.locations.size(); ++i) {
        p.locations.data()[i] = sample_normal(rng, 0.0, 1.0);
    }
    std::vector<int> perm(6);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    auto q = p;
    for (int i = 0; i < 6; ++i) {
        q.locations.row(i) = p.locations.row(perm[static_cast<std::size_t>(i)]);
    }
    for (int i = 0; i < 6; ++i) {
        for (int j = 0; j < 6; ++j) {
            CHECK(edge_prob(q, i, j) ==
                  edge_prob(p, perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]));
            CHECK(edge_prob(q, i, j) >= 0.0);
            CHECK(edge_prob(q, i, j) <= 1.0);
        }
    }
}

TEST_CASE("sampled graphs") {
    Rng rng = make_substream(2, {});
    const auto full = sample_graph(make_erdos_renyi_prior(5, 1.0), rng);
    CHECK(full.sum() == 20);
    CHECK(full.diagonal().sum() == 0);

    const auto a = sample_graph(make_erdos_renyi_prior(50, 0.3), rng);
    const double n = 50.0 * 49.0;
    const double density = a.sum() / n;
    CHECK(std::abs(density - 0.3) < 3.0 * std::sqrt(0.3 * 0.7 / n));

    auto sbm = make_sbm_prior(6, 2);
    sbm.block_probs << 1.0, 0.0, 0.0, 1.0;
    sbm.block_labels = {0, 0, 0, 1, 1, 1};
    const auto b = sample_graph(sbm, rng);
    CHECK(b.topRightCorner(3, 3).sum() == 0);
    CHECK(b.bottomLeftCorner(3, 3).sum() == 0);
    CHECK(b.topLeftCorner(3, 3).sum() == 6);
}

TEST_CASE("rho posterior counts") {
    auto p = make_erdos_renyi_prior(2, 0.5, BetaPrior{1.0, 1.0});
    Eigen::MatrixXi a(2, 2);
    a << 0, 1, 0, 0;
    const auto post = rho_posterior(p, a);
    CHECK(post.a == 2.0);
    CHECK(post.b == 2.0);

    Eigen::MatrixXi all = Eigen::MatrixXi::Ones(2, 2);
    all.diagonal().setZero();
    const auto dense = rho_posterior(p, all);
    CHECK(dense.a == 3.0);
    CHECK(dense.b == 1.0);

    auto self = make_erdos_renyi_prior(2, 0.5, BetaPrior{1.0, 1.0}, true);
    CHECK(rho_posterior(self, Eigen::MatrixXi::Ones(2, 2)).a == 5.0);
    CHECK(possible_edges(3, false) == 6);
    CHECK(possible_edges(3, true) == 9);
}

TEST_CASE("rho draws match the Beta posterior mean") {
    auto p = make_erdos_renyi_prior(10, 0.5, BetaPrior{2.0, 3.0});
    Rng rng = make_substream(3, {});
    const auto a = sample_graph(make_erdos_renyi_prior(10, 0.25), rng);
    const auto post = rho_posterior(p, a);
    const double m = post.a / (post.a + post.b);
    const double sd = std::sqrt(post.a * post.b / ((post.a + post.b) * (post.a + post.b) * (post.a + post.b + 1.0)));
    std::vector<double> draws;
    for (int i = 0; i < 10000; ++i) {
        draws.push_back(resample_rho(p, a, rng).rho);
    }
    CHECK(oracle::mean_within(draws, m, sd));
    CHECK_THROWS_AS((void)resample_rho(make_sbm_prior(3, 1), a.topLeftCorner(3, 3), rng), std::invalid_argument);
}

TEST_CASE("distance hypers keep the tau prior without likelihood") {
    auto p = make_latent_distance_prior(5, 0.0, 1.0, 2, LogNormalPrior{0.3, 0.4});
    const Eigen::MatrixXi a = Eigen::MatrixXi::Zero(5, 5);
    Rng rng = make_substream(4, {});
    std::vector<double> log_tau;
    for (int i = 0; i < 20000; ++i) {
        p = resample_distance_hypers(p, a, rng);
        if (i >= 100 && i % 10 == 0) {
            log_tau.push_back(std::log(p.tau));
        }
    }
    const double d =
        oracle::ks_statistic(log_tau, [](double x) { return oracle::normal_cdf(x, 0.3, 0.4); });
    CHECK(oracle::ks_pvalue(d, static_cast<double>(log_tau.size())) > 0.01);
}

TEST_CASE("connected nodes are drawn together") {
    auto p = make_latent_distance_prior(2, 0.9, 0.5, 2, LogNormalPrior{std::log(0.5), 0.01});
    Eigen::MatrixXi a(2, 2);
    a << 0, 1, 1, 0;
    Rng rng = make_substream(5, {});
    DistanceUpdateStats stats;
    std::vector<double> dist;
    for (int i = 0; i < 20000; ++i) {
        p = resample_distance_hypers(p, a, rng, &stats);
        if (i >= 500) {
            dist.push_back((p.locations.row(0) - p.locations.row(1)).norm());
        }
    }
    // Under N(0, I) in 2D the difference has norm sqrt(2) * Rayleigh, mean sqrt(pi).
    const double prior_mean = std::sqrt(std::numbers::pi);

    // Grid posterior for d = ||x_1 - x_2||: density ∝ d exp(-d^2 / 4) (rho e^{-d/tau})^2.
    double num = 0.0;
    double den = 0.0;
    for (int i = 1; i < 200000; ++i) {
        const double d = i * 1e-4;
        const double w = d * std::exp(-d * d / 4.0) * std::pow(0.9 * std::exp(-d / 0.5), 2.0);
        num += d * w;
        den += w;
    }
    CHECK(oracle::mean(dist) < prior_mean);
    CHECK(oracle::mean(dist) == doctest::Approx(num / den).epsilon(0.05));
    const double rate = static_cast<double>(stats.accepted) / static_cast<double>(stats.proposals);
    CHECK(rate > 0.0);
    CHECK(rate < 1.0);
}

TEST_CASE("single block sbm reduces to Erdos-Renyi") {
    Rng rng = make_substream(6, {});
    const auto a = sample_graph(make_erdos_renyi_prior(8, 0.3), rng);
    auto sbm = make_sbm_prior(8, 1, BetaPrior{1.0, 1.0});
    const auto er = make_erdos_renyi_prior(8, 0.3, BetaPrior{1.0, 1.0});
    const auto post = rho_posterior(er, a);
    std::vector<double> draws;
    for (int i = 0; i < 10000; ++i) {
        sbm = resample_sbm(sbm, a, rng);
        draws.push_back(sbm.block_probs(0, 0));
    }
    const double m = post.a / (post.a + post.b);
    const double sd = std::sqrt(m * (1.0 - m) / (post.a + post.b + 1.0));
    CHECK(oracle::mean_within(draws, m, sd, 4.0));
}

TEST_CASE("empty graph leaves block probabilities at Beta(a, b + pairs)") {
    auto sbm = make_sbm_prior(6, 2, BetaPrior{2.0, 3.0});
    const Eigen::MatrixXi a = Eigen::MatrixXi::Zero(6, 6);
    Rng rng = make_substream(7, {});
    std::vector<double> b00;
    std::vector<double> b01;
    for (int i = 0; i < 20000; ++i) {
        auto s = sbm;
        s.block_labels = {0, 0, 0, 1, 1, 1};
        s = resample_sbm(s, a, rng);
        b00.push_back(s.block_probs(0, 0));
        b01.push_back(s.block_probs(0, 1));
    }
    // Within block 0 there are 6 ordered pairs, across blocks 9.
    const auto beta_sd = [](double x, double y) { return std::sqrt(x * y / ((x + y) * (x + y) * (x + y + 1.0))); };
    CHECK(oracle::mean_within(b00, 2.0 / 11.0, beta_sd(2.0, 9.0)));
    CHECK(oracle::mean_within(b01, 2.0 / 14.0, beta_sd(2.0, 12.0)));
}

TEST_CASE("planted blocks are recovered") {
    Rng rng = make_substream(8, {});
    std::vector<int> truth;
    const auto a = planted_two_block(40, 0.9, 0.05, rng, truth);
    const auto spectral = spectral_labels(a);
    CHECK(agreement(spectral, truth) >= 0.95);
    auto sbm = make_sbm_prior(40, 2);
    for (int it = 0; it < 200; ++it) {
        sbm = resample_sbm(sbm, a, rng);
    }
    CHECK(agreement(sbm.block_labels, spectral) >= 0.95);
}

TEST_CASE("graph prior kind names round trip") {
    for (const auto k : {GraphPriorKind::empty, GraphPriorKind::complete, GraphPriorKind::erdos_renyi,
                         GraphPriorKind::latent_distance, GraphPriorKind::sbm}) {
        CHECK(graph_prior_kind_from_string(to_string(k)) == k);
    }
    CHECK_THROWS_AS((void)graph_prior_kind_from_string("smallworld"), std::invalid_argument);
}
