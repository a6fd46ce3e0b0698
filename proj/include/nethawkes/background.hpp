#pragma once

#include "nethawkes/gp_kernel.hpp"
#include "nethawkes/random.hpp"

#include <Eigen/Core>

#include <vector>

namespace nethawkes {

enum class BackgroundKind { constant, lgcp };

/// How the LGCP rate is read between grid nodes. `linear_rate` interpolates the
/// rate itself, which makes the trapezoid rule the exact integral of the
/// interpolant. `linear_log` interpolates y(t) and exponentiates.
enum class RateInterpolation { linear_rate, linear_log };

/// Gamma in shape/rate form.
struct GammaPrior {
    double shape{1.0};
    double rate{1.0};
};

/// Log-normal: log X ~ Normal(log_mean, log_sd^2).
struct LogNormalPrior {
    double log_mean{0.0};
    double log_sd{1.0};
};

/// Per-process background rates lambda_{0,k}(t).
///
/// constant: lambda_{0,k}(t) = rates[k], Gamma(rate_prior) a priori.
/// lgcp:     lambda_{0,k}(t) = offsets[k] + scales[k] * exp(y(t)), with y a GP
///           sampled on the M+1 grid nodes m * horizon / M and shared by all processes.
struct BackgroundModel {
    BackgroundKind kind{BackgroundKind::constant};
    double horizon{1.0};

    std::vector<double> rates;
    GammaPrior rate_prior;

    std::vector<double> offsets;
    std::vector<double> scales;
    std::vector<double> grid_y;
    GpKernelSpec kernel;
    LogNormalPrior offset_prior;
    LogNormalPrior scale_prior;
    RateInterpolation interpolation{RateInterpolation::linear_rate};
    double proposal_sd{0.25};

    [[nodiscard]] int num_processes() const;
    [[nodiscard]] int grid_intervals() const;
    [[nodiscard]] double grid_spacing() const;
};

[[nodiscard]] BackgroundModel make_constant_background(std::vector<double> rates, double horizon,
                                                       GammaPrior prior = {});
/// Starts from y = 0, unit offsets and scales; see calibrate_lgcp_priors.
[[nodiscard]] BackgroundModel make_lgcp_background(int num_processes, double horizon, int grid_intervals,
                                                   GpKernelSpec kernel,
                                                   RateInterpolation interpolation =
                                                       RateInterpolation::linear_rate);

void validate(const BackgroundModel& model);

[[nodiscard]] double background_rate(const BackgroundModel& model, int k, double t);
/// Expected background events on [0, horizon].
[[nodiscard]] double background_integral(const BackgroundModel& model, int k);
/// Expected background events on [t0, t1] (piecewise trapezoid for lgcp).
[[nodiscard]] double background_integral(const BackgroundModel& model, int k, double t0, double t1);
/// Upper bound of the rate over [0, horizon].
[[nodiscard]] double background_max_rate(const BackgroundModel& model, int k);

[[nodiscard]] GammaPrior constant_rate_posterior(const BackgroundModel& model, long background_count,
                                                 double horizon);
[[nodiscard]] BackgroundModel resample_constant_rate(const BackgroundModel& model, int k,
                                                     long background_count, double horizon, Rng& rng);

/// Cholesky factor of the GP prior covariance on the grid; reused across sweeps.
class LgcpGridPrior {
public:
    explicit LgcpGridPrior(const BackgroundModel& model);

    [[nodiscard]] Eigen::VectorXd sample(Rng& rng) const;
    [[nodiscard]] const Eigen::MatrixXd& cholesky() const noexcept { return chol_; }

private:
    Eigen::MatrixXd chol_;
};

struct LgcpUpdateStats {
    long ess_evaluations{0};
    long metropolis_proposals{0};
    long metropolis_accepted{0};
};

/// Poisson log likelihood of the background-attributed events, one list of times per process.
[[nodiscard]] double lgcp_log_likelihood(const BackgroundModel& model,
                                         const std::vector<std::vector<double>>& background_times);

/// Elliptical slice sweeps on the grid, then log-scale random-walk Metropolis on
/// each offset and scale against their log-normal priors.
[[nodiscard]] BackgroundModel resample_lgcp(const BackgroundModel& model,
                                            const std::vector<std::vector<double>>& background_times,
                                            Rng& rng, const LgcpGridPrior& prior, int ess_sweeps = 1,
                                            LgcpUpdateStats* stats = nullptr);
[[nodiscard]] BackgroundModel resample_lgcp(const BackgroundModel& model,
                                            const std::vector<std::vector<double>>& background_times,
                                            Rng& rng);

/// Sets offset/scale priors so the smallest and largest homogeneous rates in the
/// training counts fall within two prior SDs of the expected LGCP rate, and
/// initializes offsets/scales at the prior median.
void calibrate_lgcp_priors(BackgroundModel& model, const std::vector<long>& counts, double horizon);

/// Draws every background parameter from its prior.
[[nodiscard]] BackgroundModel sample_background_prior(const BackgroundModel& model, Rng& rng);

/// Extends an LGCP grid to cover `new_horizon`, filling new nodes with the GP
/// conditional mean given the existing nodes. Constant models only change horizon.
[[nodiscard]] BackgroundModel extend_background(const BackgroundModel& model, double new_horizon);

} // namespace nethawkes
