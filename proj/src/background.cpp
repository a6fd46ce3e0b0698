#include "nethawkes/background.hpp"

#include "nethawkes/errors.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace nethawkes {

int BackgroundModel::num_processes() const {
    return static_cast<int>(kind == BackgroundKind::constant ? rates.size() : offsets.size());
}

int BackgroundModel::grid_intervals() const {
    return grid_y.empty() ? 0 : static_cast<int>(grid_y.size()) - 1;
}

double BackgroundModel::grid_spacing() const {
    return horizon / grid_intervals();
}

BackgroundModel make_constant_background(std::vector<double> rates, double horizon, GammaPrior prior) {
    BackgroundModel m;
    m.kind = BackgroundKind::constant;
    m.horizon = horizon;
    m.rates = std::move(rates);
    m.rate_prior = prior;
    validate(m);
    return m;
}

BackgroundModel make_lgcp_background(int num_processes, double horizon, int grid_intervals,
                                     GpKernelSpec kernel, RateInterpolation interpolation) {
    BackgroundModel m;
    m.kind = BackgroundKind::lgcp;
    m.horizon = horizon;
    m.offsets.assign(static_cast<std::size_t>(num_processes), 1.0);
    m.scales.assign(static_cast<std::size_t>(num_processes), 1.0);
    m.grid_y.assign(static_cast<std::size_t>(grid_intervals) + 1, 0.0);
    m.kernel = std::move(kernel);
    m.interpolation = interpolation;
    validate(m);
    return m;
}

void validate(const BackgroundModel& model) {
    if (!(model.horizon > 0.0)) {
        throw std::invalid_argument("background horizon must be positive");
    }
    if (model.kind == BackgroundKind::constant) {
        if (model.rates.empty()) {
            throw std::invalid_argument("constant background needs one rate per process");
        }
        for (double r : model.rates) {
            if (!(r >= 0.0) || !std::isfinite(r)) {
                throw std::invalid_argument("background rates must be finite and nonnegative");
            }
        }
        if (!(model.rate_prior.shape > 0.0) || !(model.rate_prior.rate > 0.0)) {
            throw std::invalid_argument("background rate prior needs positive shape and rate");
        }
        return;
    }
    if (model.offsets.empty() || model.offsets.size() != model.scales.size()) {
        throw std::invalid_argument("lgcp background needs matching offsets and scales");
    }
    if (model.grid_y.size() < 2) {
        throw std::invalid_argument("lgcp grid needs at least one interval");
    }
    for (std::size_t k = 0; k < model.offsets.size(); ++k) {
        if (!(model.offsets[k] >= 0.0) || !(model.scales[k] >= 0.0)) {
            throw std::invalid_argument("lgcp offsets and scales must be nonnegative");
        }
    }
    if (!(model.offset_prior.log_sd > 0.0) || !(model.scale_prior.log_sd > 0.0)) {
        throw std::invalid_argument("log-normal prior sd must be positive");
    }
    validate(model.kernel);
}

namespace {

struct GridPosition {
    std::size_t cell;
    double frac;
};

GridPosition locate(const BackgroundModel& model, double t) {
    const int m_max = model.grid_intervals();
    const double u = t / model.grid_spacing();
    if (!(u > 0.0)) {
        return {0, 0.0};
    }
    if (u >= m_max) {
        return {static_cast<std::size_t>(m_max - 1), 1.0};
    }
    const auto cell = static_cast<std::size_t>(std::floor(u));
    return {cell, u - static_cast<double>(cell)};
}

// The factor multiplying scales[k] at a grid position.
double modulation(const BackgroundModel& model, const GridPosition& pos) {
    const double y0 = model.grid_y[pos.cell];
    const double y1 = model.grid_y[pos.cell + 1];
    if (model.interpolation == RateInterpolation::linear_rate) {
        return (1.0 - pos.frac) * std::exp(y0) + pos.frac * std::exp(y1);
    }
    return std::exp((1.0 - pos.frac) * y0 + pos.frac * y1);
}

// Trapezoid sum of exp(y) over the full grid.
double modulation_integral(const BackgroundModel& model) {
    const auto& y = model.grid_y;
    double acc = 0.5 * (std::exp(y.front()) + std::exp(y.back()));
    for (std::size_t m = 1; m + 1 < y.size(); ++m) {
        acc += std::exp(y[m]);
    }
    return acc * model.grid_spacing();
}

} // namespace

double background_rate(const BackgroundModel& model, int k, double t) {
    const auto kk = static_cast<std::size_t>(k);
    if (model.kind == BackgroundKind::constant) {
        return model.rates[kk];
    }
    return model.offsets[kk] + model.scales[kk] * modulation(model, locate(model, t));
}

double background_integral(const BackgroundModel& model, int k) {
    const auto kk = static_cast<std::size_t>(k);
    if (model.kind == BackgroundKind::constant) {
        return model.rates[kk] * model.horizon;
    }
    return model.offsets[kk] * model.horizon + model.scales[kk] * modulation_integral(model);
}

double background_integral(const BackgroundModel& model, int k, double t0, double t1) {
    if (!(t1 > t0)) {
        return 0.0;
    }
    const auto kk = static_cast<std::size_t>(k);
    if (model.kind == BackgroundKind::constant) {
        return model.rates[kk] * (t1 - t0);
    }
    if (t0 <= 0.0 && t1 == model.horizon) {
        return background_integral(model, k);
    }
    const double h = model.grid_spacing();
    double acc = 0.0;
    for (auto cell = static_cast<long>(std::floor(std::max(t0, 0.0) / h)); cell * h < t1; ++cell) {
        const double a = std::max(t0, cell * h);
        const double b = std::min(t1, (cell + 1) * h);
        if (b > a) {
            acc += 0.5 * (b - a) * (background_rate(model, k, a) + background_rate(model, k, b));
        }
    }
    return acc;
}

double background_max_rate(const BackgroundModel& model, int k) {
    const auto kk = static_cast<std::size_t>(k);
    if (model.kind == BackgroundKind::constant) {
        return model.rates[kk];
    }
    // Both interpolation modes are maximized at a grid node.
    const double y_max = *std::max_element(model.grid_y.begin(), model.grid_y.end());
    return model.offsets[kk] + model.scales[kk] * std::exp(y_max);
}

GammaPrior constant_rate_posterior(const BackgroundModel& model, long background_count,
                                   double horizon) {
    return {model.rate_prior.shape + static_cast<double>(background_count),
            model.rate_prior.rate + horizon};
}

BackgroundModel resample_constant_rate(const BackgroundModel& model, int k, long background_count,
                                       double horizon, Rng& rng) {
    if (model.kind != BackgroundKind::constant) {
        throw std::invalid_argument("resample_constant_rate needs a constant background");
    }
    const auto post = constant_rate_posterior(model, background_count, horizon);
    BackgroundModel out = model;
    out.rates[static_cast<std::size_t>(k)] = sample_gamma(rng, post.shape, post.rate);
    return out;
}

LgcpGridPrior::LgcpGridPrior(const BackgroundModel& model) {
    if (model.kind != BackgroundKind::lgcp) {
        throw std::invalid_argument("grid prior needs an lgcp background");
    }
    std::vector<double> times(model.grid_y.size());
    for (std::size_t m = 0; m < times.size(); ++m) {
        times[m] = static_cast<double>(m) * model.grid_spacing();
    }
    chol_ = gp_cholesky(gp_covariance(times, model.kernel));
}

Eigen::VectorXd LgcpGridPrior::sample(Rng& rng) const {
    Eigen::VectorXd z(chol_.rows());
    for (Eigen::Index i = 0; i < z.size(); ++i) {
        z[i] = sample_normal(rng, 0.0, 1.0);
    }
    return chol_ * z;
}

namespace {

// Precomputed grid positions of the background events of each process.
struct EventGrid {
    std::vector<std::vector<GridPosition>> positions;

    EventGrid(const BackgroundModel& model, const std::vector<std::vector<double>>& times) {
        positions.resize(times.size());
        for (std::size_t k = 0; k < times.size(); ++k) {
            positions[k].reserve(times[k].size());
            for (double t : times[k]) {
                positions[k].push_back(locate(model, t));
            }
        }
    }
};

double process_log_likelihood(const BackgroundModel& model, const std::vector<GridPosition>& pos,
                              std::size_t k, double mod_integral) {
    const double mu = model.offsets[k];
    const double alpha = model.scales[k];
    double ll = -(mu * model.horizon + alpha * mod_integral);
    for (const auto& p : pos) {
        const double rate = mu + alpha * modulation(model, p);
        if (!(rate > 0.0)) {
            return -std::numeric_limits<double>::infinity();
        }
        ll += std::log(rate);
    }
    return ll;
}

double total_log_likelihood(const BackgroundModel& model, const EventGrid& grid) {
    const double mod_integral = modulation_integral(model);
    const auto num_k = static_cast<long>(model.offsets.size());
    std::vector<double> parts(static_cast<std::size_t>(num_k));
#pragma omp parallel for schedule(static)
    for (long k = 0; k < num_k; ++k) {
        const auto kk = static_cast<std::size_t>(k);
        parts[kk] = process_log_likelihood(model, grid.positions[kk], kk, mod_integral);
    }
    double total = 0.0;
    for (double v : parts) {
        total += v;
    }
    return total;
}

void check_event_lists(const BackgroundModel& model, const std::vector<std::vector<double>>& times) {
    if (static_cast<int>(times.size()) != model.num_processes()) {
        throw std::invalid_argument("need one background event list per process");
    }
}

} // namespace

double lgcp_log_likelihood(const BackgroundModel& model,
                           const std::vector<std::vector<double>>& background_times) {
    check_event_lists(model, background_times);
    return total_log_likelihood(model, EventGrid(model, background_times));
}

BackgroundModel resample_lgcp(const BackgroundModel& model,
                              const std::vector<std::vector<double>>& background_times, Rng& rng,
                              const LgcpGridPrior& prior, int ess_sweeps, LgcpUpdateStats* stats) {
    if (model.kind != BackgroundKind::lgcp) {
        throw std::invalid_argument("resample_lgcp needs an lgcp background");
    }
    check_event_lists(model, background_times);
    const EventGrid grid(model, background_times);
    BackgroundModel cur = model;
    const auto n_grid = static_cast<Eigen::Index>(cur.grid_y.size());

    for (int sweep = 0; sweep < ess_sweeps; ++sweep) {
        const Eigen::Map<const Eigen::VectorXd> y0(cur.grid_y.data(), n_grid);
        const Eigen::VectorXd start = y0;
        const Eigen::VectorXd nu = prior.sample(rng);
        const double level = total_log_likelihood(cur, grid) + std::log(sample_uniform(rng));
        double theta = 2.0 * std::numbers::pi * sample_uniform(rng);
        double lo = theta - 2.0 * std::numbers::pi;
        double hi = theta;
        BackgroundModel prop = cur;
        for (;;) {
            const Eigen::VectorXd y = start * std::cos(theta) + nu * std::sin(theta);
            std::copy(y.data(), y.data() + n_grid, prop.grid_y.begin());
            if (stats) {
                ++stats->ess_evaluations;
            }
            if (total_log_likelihood(prop, grid) > level) {
                break;
            }
            if (theta < 0.0) {
                lo = theta;
            } else {
                hi = theta;
            }
            theta = lo + (hi - lo) * sample_uniform(rng);
        }
        cur = std::move(prop);
    }

    const double mod_integral = modulation_integral(cur);
    const auto log_target = [&](const BackgroundModel& m, std::size_t k) {
        const double lm = std::log(m.offsets[k]);
        const double la = std::log(m.scales[k]);
        const double zo = (lm - m.offset_prior.log_mean) / m.offset_prior.log_sd;
        const double za = (la - m.scale_prior.log_mean) / m.scale_prior.log_sd;
        return process_log_likelihood(m, grid.positions[k], k, mod_integral) - 0.5 * zo * zo - 0.5 * za * za;
    };
    for (std::size_t k = 0; k < cur.offsets.size(); ++k) {
        for (int which = 0; which < 2; ++which) {
            auto& slot = which == 0 ? cur.offsets[k] : cur.scales[k];
            if (!(slot > 0.0)) {
                continue;
            }
            const double before = log_target(cur, k);
            const double old_value = slot;
            slot = old_value * std::exp(cur.proposal_sd * sample_normal(rng, 0.0, 1.0));
            const double after = log_target(cur, k);
            if (stats) {
                ++stats->metropolis_proposals;
            }
            if (std::log(sample_uniform(rng)) < after - before) {
                if (stats) {
                    ++stats->metropolis_accepted;
                }
            } else {
                slot = old_value;
            }
        }
    }
    return cur;
}

BackgroundModel resample_lgcp(const BackgroundModel& model,
                              const std::vector<std::vector<double>>& background_times, Rng& rng) {
    return resample_lgcp(model, background_times, rng, LgcpGridPrior(model));
}

void calibrate_lgcp_priors(BackgroundModel& model, const std::vector<long>& counts, double horizon) {
    if (model.kind != BackgroundKind::lgcp) {
        throw std::invalid_argument("calibration needs an lgcp background");
    }
    if (counts.empty()) {
        throw std::invalid_argument("calibration needs per-process counts");
    }
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (long c : counts) {
        // Half an event keeps empty processes from pulling the prior to zero.
        const double r = std::log(std::max(static_cast<double>(c), 0.5) / horizon);
        lo = std::min(lo, r);
        hi = std::max(hi, r);
    }
    const double mid = 0.5 * (lo + hi);
    const double half_range = 0.5 * (hi - lo);
    // E[exp(y)] under the GP marginal at t = 0.
    const double mean_mod = std::exp(0.5 * kernel_value(model.kernel, 0.0, 0.0));
    // Median total rate exp(m) (1 + E[exp y]) sits at the log-midpoint; two SDs span the range.
    const double log_median = mid - std::log1p(mean_mod);
    const double sd = std::max(0.25, 0.5 * half_range);
    model.offset_prior = {log_median, sd};
    model.scale_prior = {log_median, sd};
    const double init = std::exp(log_median);
    std::fill(model.offsets.begin(), model.offsets.end(), init);
    std::fill(model.scales.begin(), model.scales.end(), init);
}

BackgroundModel sample_background_prior(const BackgroundModel& model, Rng& rng) {
    BackgroundModel out = model;
    if (model.kind == BackgroundKind::constant) {
        for (auto& r : out.rates) {
            r = sample_gamma(rng, model.rate_prior.shape, model.rate_prior.rate);
        }
        return out;
    }
    const Eigen::VectorXd y = LgcpGridPrior(model).sample(rng);
    std::copy(y.data(), y.data() + y.size(), out.grid_y.begin());
    for (auto& v : out.offsets) {
        v = std::exp(sample_normal(rng, model.offset_prior.log_mean, model.offset_prior.log_sd));
    }
    for (auto& v : out.scales) {
        v = std::exp(sample_normal(rng, model.scale_prior.log_mean, model.scale_prior.log_sd));
    }
    return out;
}

BackgroundModel extend_background(const BackgroundModel& model, double new_horizon) {
    BackgroundModel out = model;
    if (model.kind == BackgroundKind::constant) {
        out.horizon = std::max(model.horizon, new_horizon);
        return out;
    }
    if (new_horizon <= model.horizon) {
        return out;
    }
    const double h = model.grid_spacing();
    const int old_m = model.grid_intervals();
    const int new_m = static_cast<int>(std::ceil(new_horizon / h - 1e-9));
    std::vector<double> old_t(static_cast<std::size_t>(old_m) + 1);
    for (int m = 0; m <= old_m; ++m) {
        old_t[static_cast<std::size_t>(m)] = m * h;
    }
    const Eigen::MatrixXd cov = gp_covariance(old_t, model.kernel);
    const Eigen::LLT<Eigen::MatrixXd> llt(cov);
    if (llt.info() != Eigen::Success) {
        throw NumericalError("kernel matrix is not positive definite after jitter");
    }
    const Eigen::Map<const Eigen::VectorXd> y(model.grid_y.data(), old_m + 1);
    const Eigen::VectorXd weights = llt.solve(y);
    out.grid_y.resize(static_cast<std::size_t>(new_m) + 1);
    for (int m = old_m + 1; m <= new_m; ++m) {
        double mean = 0.0;
        for (int j = 0; j <= old_m; ++j) {
            mean += kernel_value(model.kernel, m * h, old_t[static_cast<std::size_t>(j)]) * weights[j];
        }
        out.grid_y[static_cast<std::size_t>(m)] = mean;
    }
    out.horizon = new_m * h;
    return out;
}

} // namespace nethawkes
