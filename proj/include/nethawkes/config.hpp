#pragma once

#include "nethawkes/gibbs.hpp"
#include "nethawkes/serialization.hpp"
#include "nethawkes/simulate.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace nethawkes {

struct BackgroundConfig {
    BackgroundKind kind{BackgroundKind::constant};
    /// Simulation rates; a single entry is broadcast to every process.
    std::vector<double> rates{1.0};
    GammaPrior rate_prior{1.0, 1.0};
    int grid_intervals{100};
    GpKernelSpec kernel;
    RateInterpolation interpolation{RateInterpolation::linear_rate};
    double offset{0.5};
    double scale{0.5};
};

struct GraphPriorConfig {
    GraphPriorKind kind{GraphPriorKind::erdos_renyi};
    /// Negative: the largest rho keeping both the outlier and the bulk inside the unit disc.
    double rho{-1.0};
    BetaPrior rho_prior;
    bool resample_rho{true};
    double tau{1.0};
    int dims{2};
    LogNormalPrior tau_prior{0.0, 1.0};
    int blocks{2};
    BetaPrior block_prior;
    double concentration{1.0};
};

struct ModelConfig {
    int num_processes{0};  // 0: taken from the data
    double horizon{0.0};   // 0: required from the data source
    double dt_max{1.0};
    bool allow_self_edges{false};
    IntegralMode integral_mode{IntegralMode::full_mass};
    BackgroundConfig background;
    GraphPriorConfig graph_prior;
    WeightPrior weight_prior;
    ImpulsePrior impulse_prior;
    int clusters{0};  // > 0: latent process identities with this many clusters
};

struct SimulateConfig {
    SimulationMethod method{SimulationMethod::branching};
    long max_events{10'000'000};
    /// Explicit network; when absent the network is drawn from the priors.
    std::optional<NetworkState> network;
};

struct InferenceConfig {
    long iterations{1000};
    long burn_in{0};
    std::uint64_t seed{0};
    int threads{1};
    int ess_sweeps{1};
    bool resample_beta_w0{true};
    bool resample_graph_hypers{true};
};

struct StabilityConfig {
    int num_nodes{64};
    double alpha{1.0};
    double beta{5.0};
    double rho{-1.0};  // negative: max_stable_rho
    double confidence_sigmas{3.0};
    int draws{10000};
};

struct IoConfig {
    std::string data;
    std::string out;
    std::string truth;
    std::string test;
    std::string chain;
};

struct RunConfig {
    ModelConfig model;
    SimulateConfig simulate;
    InferenceConfig inference;
    StabilityConfig stability;
    IoConfig io;
};

/// Unknown keys and out-of-range values raise ValidationError.
[[nodiscard]] RunConfig parse_config(const Json& j);
[[nodiscard]] RunConfig load_config(const std::filesystem::path& path);
[[nodiscard]] Json config_to_json(const RunConfig& config);
void validate(const RunConfig& config);

[[nodiscard]] GraphPrior make_graph_prior(const ModelConfig& model, int num_processes);
[[nodiscard]] BackgroundModel make_background(const ModelConfig& model, int num_processes, double horizon);

/// Sampler configuration for a data set on `num_processes` processes over `horizon`.
[[nodiscard]] GibbsConfig make_gibbs_config(const RunConfig& config, int num_processes, double horizon);

/// Generative parameters: the explicit network if given, otherwise a draw from the priors.
[[nodiscard]] HawkesParams make_simulation_params(const RunConfig& config, Rng& rng);

} // namespace nethawkes
