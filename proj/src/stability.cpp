#include "nethawkes/stability.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCore>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace nethawkes {

namespace {
constexpr Eigen::Index kDenseCutoff = 512;
} // namespace

StabilitySpec make_stability_spec(int num_nodes, double alpha, double beta, double rho) {
    if (num_nodes < 1 || !(alpha > 0.0) || !(beta > 0.0) || !(rho >= 0.0 && rho <= 1.0)) {
        throw std::invalid_argument("stability spec needs K >= 1, alpha, beta > 0 and rho in [0, 1]");
    }
    StabilitySpec s{num_nodes, alpha, beta, rho, 0.0, 0.0};
    s.mu_eff = rho * alpha / beta;
    s.sigma_eff = std::sqrt(rho * ((1.0 - rho) * alpha * alpha + alpha)) / beta;
    return s;
}

double perron_root(const Eigen::SparseMatrix<double>& m, double tol, int max_iterations) {
    const auto n = m.rows();
    if (n == 0) {
        return 0.0;
    }
    Eigen::VectorXd x = Eigen::VectorXd::Constant(n, 1.0 / std::sqrt(static_cast<double>(n)));
    double estimate = 0.0;
    for (int it = 0; it < max_iterations; ++it) {
        Eigen::VectorXd y = m * x + x;
        const double norm = y.norm();
        if (norm == 0.0) {
            return 0.0;
        }
        y /= norm;
        const double next = norm - 1.0;
        const bool converged = std::abs(next - estimate) <= tol * std::max(1.0, std::abs(next));
        estimate = next;
        x = std::move(y);
        if (converged && it > 0) {
            break;
        }
    }
    return std::max(estimate, 0.0);
}

double spectral_radius(const Eigen::MatrixXd& m) {
    if (m.rows() != m.cols()) {
        throw std::invalid_argument("spectral_radius needs a square matrix");
    }
    if (m.rows() == 0) {
        return 0.0;
    }
    if (m.rows() <= kDenseCutoff || (m.array() < 0.0).any()) {
        Eigen::EigenSolver<Eigen::MatrixXd> solver(m, false);
        if (solver.info() != Eigen::Success) {
            throw std::runtime_error("eigensolver failed");
        }
        return solver.eigenvalues().cwiseAbs().maxCoeff();
    }
    return perron_root(m.sparseView());
}

double spectral_radius(const Eigen::MatrixXi& adjacency, const Eigen::MatrixXd& weights) {
    if (adjacency.rows() != adjacency.cols() || weights.rows() != adjacency.rows() ||
        weights.cols() != adjacency.cols()) {
        throw std::invalid_argument("adjacency and weights must be square and the same shape");
    }
    return spectral_radius(Eigen::MatrixXd(adjacency.cast<double>().cwiseProduct(weights)));
}

MaxEigPrediction theoretical_max_eig(const StabilitySpec& spec) {
    const double k = spec.num_nodes;
    return {spec.mu_eff * k, spec.sigma_eff, spec.sigma_eff * std::sqrt(k)};
}

double stability_criterion(const StabilitySpec& spec, double confidence_sigmas) {
    const auto p = theoretical_max_eig(spec);
    return std::min(p.bulk_radius, p.mean + confidence_sigmas * p.sd);
}

double max_stable_rho(double alpha, double beta, int num_nodes, double confidence_sigmas) {
    auto crit = [&](double rho) {
        return stability_criterion(make_stability_spec(num_nodes, alpha, beta, rho), confidence_sigmas);
    };
    if (crit(1.0) <= 1.0) {
        return 1.0;
    }
    // The criterion is concave in rho and zero at rho = 0, so there is a single crossing.
    double lo = 0.0;
    double hi = 1.0;
    for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (crit(mid) <= 1.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return lo;
}

double conservative_stable_rho(double alpha, double beta, int num_nodes, double confidence_sigmas) {
    auto crit = [&](double rho) {
        const auto p = theoretical_max_eig(make_stability_spec(num_nodes, alpha, beta, rho));
        return std::max(p.bulk_radius, p.mean + confidence_sigmas * p.sd);
    };
    if (crit(1.0) <= 1.0) {
        return 1.0;
    }
    // mu K + c sigma is increasing in rho, so this crossing is unique too.
    double lo = 0.0;
    double hi = 1.0;
    for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (crit(mid) <= 1.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return lo;
}

double predicted_instability(const StabilitySpec& spec) {
    const auto p = theoretical_max_eig(spec);
    if (p.sd == 0.0) {
        return p.mean > 1.0 ? 1.0 : 0.0;
    }
    return 0.5 * std::erfc((1.0 - p.mean) / (p.sd * std::sqrt(2.0)));
}

std::vector<double> empirical_eig_distribution(const StabilitySpec& spec, int num_draws, Rng& rng) {
    if (num_draws < 1) {
        throw std::invalid_argument("num_draws must be positive");
    }
    const int k = spec.num_nodes;
    const std::uint64_t base = rng();
    std::vector<double> radii(static_cast<std::size_t>(num_draws), 0.0);
    if (spec.rho == 0.0) {
        return radii;
    }
#pragma omp parallel for schedule(dynamic)
    for (int d = 0; d < num_draws; ++d) {
        Rng local = make_substream(base, {static_cast<std::uint64_t>(d)});
        std::vector<Eigen::Triplet<double>> entries;
        const long total = static_cast<long>(k) * k;
        // Skip straight to the next edge instead of flipping K^2 coins.
        long pos = -1;
        if (spec.rho >= 1.0) {
            entries.reserve(static_cast<std::size_t>(total));
        }
        std::geometric_distribution<long> gap(std::min(spec.rho, 1.0));
        while (true) {
            pos += 1 + (spec.rho >= 1.0 ? 0 : gap(local));
            if (pos >= total) {
                break;
            }
            entries.emplace_back(static_cast<int>(pos / k), static_cast<int>(pos % k),
                                 sample_gamma(local, spec.alpha, spec.beta));
        }
        if (k <= kDenseCutoff) {
            Eigen::MatrixXd m = Eigen::MatrixXd::Zero(k, k);
            for (const auto& t : entries) {
                m(t.row(), t.col()) = t.value();
            }
            radii[static_cast<std::size_t>(d)] = spectral_radius(m);
        } else {
            Eigen::SparseMatrix<double> m(k, k);
            m.setFromTriplets(entries.begin(), entries.end());
            radii[static_cast<std::size_t>(d)] = perron_root(m);
        }
    }
    return radii;
}

EigSummary summarize_eigs(const std::vector<double>& radii, const StabilitySpec& spec) {
    if (radii.empty()) {
        throw std::invalid_argument("summarize_eigs needs at least one draw");
    }
    const double n = static_cast<double>(radii.size());
    EigSummary s;
    for (const double r : radii) {
        s.mean += r;
        s.fraction_unstable += r >= 1.0 ? 1.0 : 0.0;
    }
    s.mean /= n;
    s.fraction_unstable /= n;
    double ss = 0.0;
    for (const double r : radii) {
        ss += (r - s.mean) * (r - s.mean);
    }
    const double var = radii.size() > 1 ? ss / (n - 1.0) : 0.0;
    s.sd = std::sqrt(var);
    const auto p = theoretical_max_eig(spec);
    s.variance_ratio = p.sd > 0.0 ? var / (p.sd * p.sd) : 0.0;
    if (p.sd > 0.0) {
        std::vector<double> sorted = radii;
        std::sort(sorted.begin(), sorted.end());
        for (std::size_t i = 0; i < sorted.size(); ++i) {
            const double f = 0.5 * std::erfc(-(sorted[i] - p.mean) / (p.sd * std::sqrt(2.0)));
            s.ks_distance = std::max({s.ks_distance, f - static_cast<double>(i) / n,
                                      static_cast<double>(i + 1) / n - f});
        }
    }
    return s;
}

} // namespace nethawkes
