#include "nethawkes/config.hpp"

#include "nethawkes/errors.hpp"
#include "nethawkes/stability.hpp"

#include <algorithm>
#include <initializer_list>
#include <string>

namespace nethawkes {

namespace {

void check_keys(const Json& j, const std::string& where, std::initializer_list<const char*> allowed) {
    if (!j.is_object()) {
        throw ValidationError(where + " must be an object");
    }
    for (const auto& item : j.items()) {
        if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return item.key() == a; })) {
            throw ValidationError("unknown key '" + item.key() + "' in " + where);
        }
    }
}

template <typename T>
void read(const Json& j, const char* key, T& target) {
    if (j.contains(key)) {
        target = j.at(key).get<T>();
    }
}

void positive(double v, const char* name) {
    if (!(v > 0.0)) {
        throw ValidationError(std::string(name) + " must be positive");
    }
}

} // namespace

RunConfig parse_config(const Json& j) {
    RunConfig c;
    try {
        check_keys(j, "config", {"model", "simulate", "inference", "stability", "io"});
        if (j.contains("model")) {
            const auto& m = j["model"];
            check_keys(m, "model", {"num_processes", "horizon", "dt_max", "allow_self_edges", "integral_mode",
                                    "background", "graph_prior", "weight_prior", "impulse_prior", "clusters"});
            auto& mc = c.model;
            read(m, "num_processes", mc.num_processes);
            read(m, "horizon", mc.horizon);
            read(m, "dt_max", mc.dt_max);
            read(m, "allow_self_edges", mc.allow_self_edges);
            read(m, "clusters", mc.clusters);
            if (m.contains("integral_mode")) {
                const auto mode = m["integral_mode"].get<std::string>();
                if (mode == "full_mass") {
                    mc.integral_mode = IntegralMode::full_mass;
                } else if (mode == "exact_truncation") {
                    mc.integral_mode = IntegralMode::exact_truncation;
                } else {
                    throw ValidationError("unknown integral_mode '" + mode + "'");
                }
            }
            if (m.contains("background")) {
                const auto& b = m["background"];
                check_keys(b, "model.background", {"kind", "rate", "rate_prior", "grid_intervals", "kernel",
                                                   "interpolation", "offset", "scale"});
                auto& bc = mc.background;
                const auto kind = b.value("kind", std::string("constant"));
                if (kind != "constant" && kind != "lgcp") {
                    throw ValidationError("unknown background kind '" + kind + "'");
                }
                bc.kind = kind == "constant" ? BackgroundKind::constant : BackgroundKind::lgcp;
                if (b.contains("rate")) {
                    bc.rates = b["rate"].is_array() ? b["rate"].get<std::vector<double>>()
                                                    : std::vector<double>{b["rate"].get<double>()};
                }
                if (b.contains("rate_prior")) {
                    check_keys(b["rate_prior"], "model.background.rate_prior", {"shape", "rate"});
                    read(b["rate_prior"], "shape", bc.rate_prior.shape);
                    read(b["rate_prior"], "rate", bc.rate_prior.rate);
                }
                read(b, "grid_intervals", bc.grid_intervals);
                if (b.contains("kernel")) {
                    bc.kernel = kernel_from_json(b["kernel"]);
                }
                if (b.contains("interpolation")) {
                    const auto interp = b["interpolation"].get<std::string>();
                    if (interp != "linear_rate" && interp != "linear_log") {
                        throw ValidationError("unknown interpolation '" + interp + "'");
                    }
                    bc.interpolation =
                        interp == "linear_rate" ? RateInterpolation::linear_rate : RateInterpolation::linear_log;
                }
                read(b, "offset", bc.offset);
                read(b, "scale", bc.scale);
            }
            if (m.contains("graph_prior")) {
                const auto& g = m["graph_prior"];
                check_keys(g, "model.graph_prior", {"kind", "rho", "rho_prior", "resample_rho", "tau", "dims",
                                                    "tau_prior", "blocks", "block_prior", "concentration"});
                auto& gc = mc.graph_prior;
                if (g.contains("kind")) {
                    try {
                        gc.kind = graph_prior_kind_from_string(g["kind"].get<std::string>());
                    } catch (const std::invalid_argument& e) {
                        throw ValidationError(e.what());
                    }
                }
                read(g, "rho", gc.rho);
                if (g.contains("rho_prior")) {
                    read(g["rho_prior"], "a", gc.rho_prior.a);
                    read(g["rho_prior"], "b", gc.rho_prior.b);
                }
                read(g, "resample_rho", gc.resample_rho);
                read(g, "tau", gc.tau);
                read(g, "dims", gc.dims);
                if (g.contains("tau_prior")) {
                    read(g["tau_prior"], "log_mean", gc.tau_prior.log_mean);
                    read(g["tau_prior"], "log_sd", gc.tau_prior.log_sd);
                }
                read(g, "blocks", gc.blocks);
                if (g.contains("block_prior")) {
                    read(g["block_prior"], "a", gc.block_prior.a);
                    read(g["block_prior"], "b", gc.block_prior.b);
                }
                read(g, "concentration", gc.concentration);
            }
            if (m.contains("weight_prior")) {
                check_keys(m["weight_prior"], "model.weight_prior", {"alpha", "beta"});
                read(m["weight_prior"], "alpha", mc.weight_prior.alpha);
                read(m["weight_prior"], "beta", mc.weight_prior.beta);
            }
            if (m.contains("impulse_prior")) {
                const auto& ip = m["impulse_prior"];
                check_keys(ip, "model.impulse_prior", {"mu0", "kappa0", "alpha0", "beta0"});
                read(ip, "mu0", mc.impulse_prior.mu0);
                read(ip, "kappa0", mc.impulse_prior.kappa0);
                read(ip, "alpha0", mc.impulse_prior.alpha0);
                read(ip, "beta0", mc.impulse_prior.beta0);
            }
        }
        if (j.contains("simulate")) {
            const auto& s = j["simulate"];
            check_keys(s, "simulate", {"method", "max_events", "network"});
            if (s.contains("method")) {
                const auto method = s["method"].get<std::string>();
                if (method != "branching" && method != "thinning") {
                    throw ValidationError("unknown simulation method '" + method + "'");
                }
                c.simulate.method = method == "branching" ? SimulationMethod::branching : SimulationMethod::thinning;
            }
            if (s.contains("max_events")) {
                c.simulate.max_events = static_cast<long>(s["max_events"].get<double>());
            }
            if (s.contains("network")) {
                c.simulate.network = network_from_json(s["network"]);
            }
        }
        if (j.contains("inference")) {
            const auto& i = j["inference"];
            check_keys(i, "inference", {"iterations", "burn_in", "seed", "threads", "ess_sweeps",
                                        "resample_beta_w0", "resample_graph_hypers"});
            read(i, "iterations", c.inference.iterations);
            read(i, "burn_in", c.inference.burn_in);
            read(i, "seed", c.inference.seed);
            read(i, "threads", c.inference.threads);
            read(i, "ess_sweeps", c.inference.ess_sweeps);
            read(i, "resample_beta_w0", c.inference.resample_beta_w0);
            read(i, "resample_graph_hypers", c.inference.resample_graph_hypers);
        }
        if (j.contains("stability")) {
            const auto& s = j["stability"];
            check_keys(s, "stability", {"num_nodes", "alpha", "beta", "rho", "confidence_sigmas", "draws"});
            read(s, "num_nodes", c.stability.num_nodes);
            read(s, "alpha", c.stability.alpha);
            read(s, "beta", c.stability.beta);
            read(s, "rho", c.stability.rho);
            read(s, "confidence_sigmas", c.stability.confidence_sigmas);
            read(s, "draws", c.stability.draws);
        }
        if (j.contains("io")) {
            const auto& io = j["io"];
            check_keys(io, "io", {"data", "out", "truth", "test", "chain"});
            read(io, "data", c.io.data);
            read(io, "out", c.io.out);
            read(io, "truth", c.io.truth);
            read(io, "test", c.io.test);
            read(io, "chain", c.io.chain);
        }
    } catch (const Json::exception& e) {
        throw ValidationError(std::string("config: ") + e.what());
    }
    validate(c);
    return c;
}

RunConfig load_config(const std::filesystem::path& path) { return parse_config(read_json_file(path)); }

Json config_to_json(const RunConfig& c) {
    const auto& m = c.model;
    const auto& b = m.background;
    const auto& g = m.graph_prior;
    Json model{{"num_processes", m.num_processes},
               {"horizon", m.horizon},
               {"dt_max", m.dt_max},
               {"allow_self_edges", m.allow_self_edges},
               {"integral_mode", m.integral_mode == IntegralMode::full_mass ? "full_mass" : "exact_truncation"},
               {"clusters", m.clusters},
               {"background",
                {{"kind", b.kind == BackgroundKind::constant ? "constant" : "lgcp"},
                 {"rate", b.rates},
                 {"rate_prior", {{"shape", b.rate_prior.shape}, {"rate", b.rate_prior.rate}}},
                 {"grid_intervals", b.grid_intervals},
                 {"kernel", kernel_to_json(b.kernel)},
                 {"interpolation", b.interpolation == RateInterpolation::linear_rate ? "linear_rate" : "linear_log"},
                 {"offset", b.offset},
                 {"scale", b.scale}}},
               {"graph_prior",
                {{"kind", to_string(g.kind)},
                 {"rho", g.rho},
                 {"rho_prior", {{"a", g.rho_prior.a}, {"b", g.rho_prior.b}}},
                 {"resample_rho", g.resample_rho},
                 {"tau", g.tau},
                 {"dims", g.dims},
                 {"tau_prior", {{"log_mean", g.tau_prior.log_mean}, {"log_sd", g.tau_prior.log_sd}}},
                 {"blocks", g.blocks},
                 {"block_prior", {{"a", g.block_prior.a}, {"b", g.block_prior.b}}},
                 {"concentration", g.concentration}}},
               {"weight_prior", {{"alpha", m.weight_prior.alpha}, {"beta", m.weight_prior.beta}}},
               {"impulse_prior",
                {{"mu0", m.impulse_prior.mu0},
                 {"kappa0", m.impulse_prior.kappa0},
                 {"alpha0", m.impulse_prior.alpha0},
                 {"beta0", m.impulse_prior.beta0}}}};
    Json simulate{{"method", c.simulate.method == SimulationMethod::branching ? "branching" : "thinning"},
                  {"max_events", c.simulate.max_events}};
    if (c.simulate.network) {
        simulate["network"] = network_to_json(*c.simulate.network);
    }
    return {{"model", model},
            {"simulate", simulate},
            {"inference",
             {{"iterations", c.inference.iterations},
              {"burn_in", c.inference.burn_in},
              {"seed", c.inference.seed},
              {"threads", c.inference.threads},
              {"ess_sweeps", c.inference.ess_sweeps},
              {"resample_beta_w0", c.inference.resample_beta_w0},
              {"resample_graph_hypers", c.inference.resample_graph_hypers}}},
            {"stability",
             {{"num_nodes", c.stability.num_nodes},
              {"alpha", c.stability.alpha},
              {"beta", c.stability.beta},
              {"rho", c.stability.rho},
              {"confidence_sigmas", c.stability.confidence_sigmas},
              {"draws", c.stability.draws}}},
            {"io",
             {{"data", c.io.data}, {"out", c.io.out}, {"truth", c.io.truth}, {"test", c.io.test}, {"chain", c.io.chain}}}};
}

void validate(const RunConfig& c) {
    const auto& m = c.model;
    if (m.num_processes < 0 || m.horizon < 0.0 || m.clusters < 0) {
        throw ValidationError("num_processes, horizon and clusters must be nonnegative");
    }
    positive(m.dt_max, "dt_max");
    positive(m.weight_prior.alpha, "weight_prior.alpha");
    positive(m.weight_prior.beta, "weight_prior.beta");
    positive(m.impulse_prior.kappa0, "impulse_prior.kappa0");
    positive(m.impulse_prior.alpha0, "impulse_prior.alpha0");
    positive(m.impulse_prior.beta0, "impulse_prior.beta0");
    positive(m.background.rate_prior.shape, "background.rate_prior.shape");
    positive(m.background.rate_prior.rate, "background.rate_prior.rate");
    for (const double r : m.background.rates) {
        if (!(r >= 0.0)) {
            throw ValidationError("background rates must be nonnegative");
        }
    }
    if (m.background.rates.empty()) {
        throw ValidationError("background.rate needs at least one value");
    }
    if (m.background.grid_intervals < 1) {
        throw ValidationError("background.grid_intervals must be at least 1");
    }
    validate(m.background.kernel);
    positive(m.background.offset, "background.offset");
    positive(m.background.scale, "background.scale");
    const auto& g = m.graph_prior;
    if (g.rho > 1.0) {
        throw ValidationError("graph_prior.rho must be at most 1");
    }
    positive(g.rho_prior.a, "graph_prior.rho_prior.a");
    positive(g.rho_prior.b, "graph_prior.rho_prior.b");
    positive(g.tau, "graph_prior.tau");
    positive(g.tau_prior.log_sd, "graph_prior.tau_prior.log_sd");
    positive(g.block_prior.a, "graph_prior.block_prior.a");
    positive(g.block_prior.b, "graph_prior.block_prior.b");
    positive(g.concentration, "graph_prior.concentration");
    if (g.dims < 1 || g.blocks < 1) {
        throw ValidationError("graph_prior.dims and graph_prior.blocks must be at least 1");
    }
    const auto& i = c.inference;
    if (i.iterations < 0 || i.burn_in < 0 || i.iterations < i.burn_in) {
        throw ValidationError("inference needs 0 <= burn_in <= iterations");
    }
    if (i.threads < 1 || i.ess_sweeps < 1) {
        throw ValidationError("threads and ess_sweeps must be at least 1");
    }
    if (c.simulate.max_events < 1) {
        throw ValidationError("simulate.max_events must be positive");
    }
    const auto& s = c.stability;
    if (s.num_nodes < 1 || s.draws < 1) {
        throw ValidationError("stability.num_nodes and stability.draws must be at least 1");
    }
    positive(s.alpha, "stability.alpha");
    positive(s.beta, "stability.beta");
    if (s.rho > 1.0) {
        throw ValidationError("stability.rho must be at most 1");
    }
}

GraphPrior make_graph_prior(const ModelConfig& m, int k) {
    const auto& g = m.graph_prior;
    double rho = g.rho;
    if (rho < 0.0) {
        rho = conservative_stable_rho(m.weight_prior.alpha, m.weight_prior.beta, k);
    }
    switch (g.kind) {
    case GraphPriorKind::empty:
        return make_empty_prior(k, m.allow_self_edges);
    case GraphPriorKind::complete:
        return make_complete_prior(k, m.allow_self_edges);
    case GraphPriorKind::erdos_renyi: {
        auto p = make_erdos_renyi_prior(k, rho, g.rho_prior, m.allow_self_edges);
        p.resample_rho = g.resample_rho;
        return p;
    }
    case GraphPriorKind::latent_distance:
        return make_latent_distance_prior(k, rho, g.tau, g.dims, g.tau_prior, m.allow_self_edges);
    case GraphPriorKind::sbm:
        return make_sbm_prior(k, g.blocks, g.block_prior, g.concentration, m.allow_self_edges);
    }
    return make_empty_prior(k, m.allow_self_edges);
}

BackgroundModel make_background(const ModelConfig& m, int k, double horizon) {
    const auto& b = m.background;
    if (b.kind == BackgroundKind::constant) {
        std::vector<double> rates = b.rates;
        if (rates.size() == 1) {
            rates.assign(static_cast<std::size_t>(k), b.rates.front());
        }
        if (static_cast<int>(rates.size()) != k) {
            throw ValidationError("background.rate has " + std::to_string(rates.size()) + " entries for " +
                                  std::to_string(k) + " processes");
        }
        return make_constant_background(std::move(rates), horizon, b.rate_prior);
    }
    auto model = make_lgcp_background(k, horizon, b.grid_intervals, b.kernel, b.interpolation);
    model.offsets.assign(static_cast<std::size_t>(k), b.offset);
    model.scales.assign(static_cast<std::size_t>(k), b.scale);
    return model;
}

GibbsConfig make_gibbs_config(const RunConfig& c, int num_processes, double horizon) {
    const auto& m = c.model;
    const int k = m.clusters > 0 ? m.clusters : num_processes;
    if (m.clusters == 0 && m.num_processes != 0 && m.num_processes != num_processes) {
        throw ValidationError("config declares " + std::to_string(m.num_processes) + " processes but the data has " +
                              std::to_string(num_processes));
    }
    GibbsConfig g;
    g.weight_prior = m.weight_prior;
    g.impulse_prior = m.impulse_prior;
    g.graph_prior = make_graph_prior(m, k);
    g.background = make_background(m, k, horizon);
    g.dt_max = m.dt_max;
    g.allow_self_edges = m.allow_self_edges;
    g.integral_mode = m.integral_mode;
    g.resample_beta_w0 = c.inference.resample_beta_w0;
    g.resample_graph_hypers = c.inference.resample_graph_hypers;
    g.ess_sweeps = c.inference.ess_sweeps;
    g.seed = c.inference.seed;
    if (m.clusters > 0) {
        g.clusters = ClusterModel{num_processes, m.clusters, {}};
    }
    return g;
}

HawkesParams make_simulation_params(const RunConfig& c, Rng& rng) {
    const auto& m = c.model;
    if (m.horizon <= 0.0) {
        throw ValidationError("simulation needs model.horizon > 0");
    }
    HawkesParams params;
    if (c.simulate.network) {
        params.network = *c.simulate.network;
        params.network.dt_max = m.dt_max;
    } else {
        if (m.num_processes < 1) {
            throw ValidationError("simulation needs model.num_processes >= 1 or an explicit network");
        }
        const int k = m.num_processes;
        // rho is taken as configured; latent positions and block structure are drawn.
        auto prior = make_graph_prior(m, k);
        if (prior.kind == GraphPriorKind::latent_distance || prior.kind == GraphPriorKind::sbm) {
            prior = sample_prior_hypers(prior, rng);
        }
        auto& net = params.network;
        net = NetworkState::disconnected(k, m.dt_max, 0.0, 1.0, m.allow_self_edges);
        net.adjacency = sample_graph(prior, rng);
        for (int i = 0; i < k; ++i) {
            for (int j = 0; j < k; ++j) {
                net.weights(i, j) = sample_gamma(rng, m.weight_prior.alpha, m.weight_prior.beta);
                const auto imp = sample_normal_gamma(impulse_posterior(m.impulse_prior, {}), m.dt_max, rng);
                net.impulse_mu(i, j) = imp.mu;
                net.impulse_tau(i, j) = imp.tau;
            }
        }
    }
    const int k = params.network.size();
    params.background = make_background(m, k, m.horizon);
    if (params.background.kind == BackgroundKind::lgcp) {
        const LgcpGridPrior grid(params.background);
        const auto y = grid.sample(rng);
        params.background.grid_y.assign(y.data(), y.data() + y.size());
    }
    validate(params);
    return params;
}

} // namespace nethawkes
