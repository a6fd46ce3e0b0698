#include "nethawkes/config.hpp"
#include "nethawkes/errors.hpp"
#include "nethawkes/evaluation.hpp"
#include "nethawkes/gibbs.hpp"
#include "nethawkes/serialization.hpp"
#include "nethawkes/simulate.hpp"
#include "nethawkes/stability.hpp"

#include <CLI11.hpp>
#include <omp.h>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <string>

namespace fs = std::filesystem;
using namespace nethawkes;

namespace {

enum Exit { kOk = 0, kUsage = 1, kData = 2, kNumerical = 3 };

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Options {
    std::string config;
    std::string data;
    std::string out;
    std::string truth;
    std::string test;
    std::string chain;
    std::string scores;
    std::optional<std::uint64_t> seed;
    std::optional<long> iterations;
    std::optional<long> burn_in;
    std::optional<double> horizon;
    std::optional<double> test_horizon;
    int threads{0};
    bool resume{false};
    bool quiet{false};
};

fs::path sibling(const fs::path& p, const std::string& suffix) {
    fs::path stem = p;
    stem.replace_extension("");
    return stem.string() + suffix;
}

std::string pick(const std::string& flag, const std::string& configured, const char* what) {
    if (!flag.empty()) {
        return flag;
    }
    if (!configured.empty()) {
        return configured;
    }
    throw UsageError(std::string("missing ") + what);
}

RunConfig load(const Options& o) {
    RunConfig c = o.config.empty() ? RunConfig{} : load_config(o.config);
    if (o.seed) {
        c.inference.seed = *o.seed;
    }
    if (o.iterations) {
        c.inference.iterations = *o.iterations;
    }
    if (o.burn_in) {
        c.inference.burn_in = *o.burn_in;
    }
    if (o.horizon) {
        c.model.horizon = *o.horizon;
    }
    if (o.threads > 0) {
        c.inference.threads = o.threads;
    }
    if (c.inference.burn_in > c.inference.iterations) {
        throw UsageError("burn-in exceeds the number of iterations");
    }
    omp_set_num_threads(c.inference.threads);
    return c;
}

std::ofstream open_out(const fs::path& p) {
    std::ofstream out(p, std::ios::trunc);
    if (!out) {
        throw std::runtime_error("cannot write " + p.string());
    }
    out << std::setprecision(17);
    return out;
}

int cmd_simulate(const Options& o) {
    const auto c = load(o);
    const fs::path out = pick(o.out, c.io.out, "--out");
    Rng rng = make_substream(c.inference.seed, {0x51u});
    const auto params = make_simulation_params(c, rng);
    SimulationOptions opts{c.simulate.method, c.simulate.max_events};
    const auto result = simulate(params, rng, opts);
    save_events(result.events, out);
    save_truth(sibling(out, ".truth.json"), {params, result.parents, result.spectral_radius});
    if (!o.quiet) {
        std::cerr << "simulated " << result.events.size() << " events on " << params.network.size()
                  << " processes over " << params.background.horizon << " s; spectral radius "
                  << result.spectral_radius << (result.spectral_radius >= 1.0 ? " (unstable)" : "") << '\n';
    }
    return kOk;
}

EventSequence load_data(const RunConfig& c, const std::string& path) {
    if (c.model.horizon <= 0.0) {
        throw UsageError("the data horizon must be given by model.horizon or --horizon");
    }
    std::optional<int> k;
    if (c.model.num_processes > 0 && c.model.clusters == 0) {
        k = c.model.num_processes;
    }
    return load_events(path, c.model.horizon, k);
}

int cmd_infer(const Options& o) {
    const auto c = load(o);
    const auto data = load_data(c, pick(o.data, c.io.data, "--data"));
    const fs::path out = pick(o.out, c.io.chain, "--out");
    const auto gibbs = make_gibbs_config(c, data.num_processes(), data.horizon());
    const long total = c.inference.iterations;

    std::optional<GibbsSampler> sampler;
    bool append = false;
    if (o.resume && fs::exists(out)) {
        auto chain = read_chain(out, true);
        // Rewrite the intact prefix so an interrupted final record does not corrupt the file.
        ChainWriter rewrite(out, false);
        for (const auto& s : chain) {
            rewrite.write(s);
        }
        if (!chain.empty()) {
            sampler.emplace(data, gibbs, chain.back());
        }
        append = true;
    }
    if (!sampler) {
        sampler.emplace(data, gibbs);
    }
    ChainWriter writer(out, append);
    const long start = sampler->state().iteration;
    if (!o.quiet) {
        std::cerr << "infer: " << data.size() << " events, K=" << sampler->working_sequence().num_processes()
                  << ", iterations " << start + 1 << ".." << total << '\n';
    }
    for (long it = start; it < total; ++it) {
        const auto& s = sampler->step();
        writer.write(s);
        if (!o.quiet && (s.iteration % 100 == 0 || s.iteration == total)) {
            std::cerr << "  iteration " << s.iteration << "  loglik " << std::setprecision(10) << s.loglik << '\n';
        }
    }
    return kOk;
}

int cmd_eval(const Options& o) {
    const auto c = load(o);
    const auto chain = read_chain(pick(o.chain, c.io.chain, "--chain"));
    const fs::path out = pick(o.out, c.io.out, "--out");
    const auto burn_in = static_cast<std::size_t>(c.inference.burn_in);
    if (burn_in >= chain.size()) {
        throw ValidationError("chain has " + std::to_string(chain.size()) + " samples, burn-in is " +
                              std::to_string(burn_in));
    }
    const std::string truth_path = o.truth.empty() ? c.io.truth : o.truth;
    const std::string test_path = o.test.empty() ? c.io.test : o.test;
    if (truth_path.empty() && test_path.empty()) {
        throw UsageError("eval needs --truth for link prediction or --test for event prediction");
    }
    Json report{{"num_samples", chain.size()}, {"burn_in", burn_in}};
    if (!truth_path.empty()) {
        if (!fs::exists(truth_path)) {
            throw ValidationError("truth file " + truth_path + " not found");
        }
        const auto truth = load_truth(truth_path);
        const auto probs = edge_posterior(chain, burn_in);
        if (probs.rows() != truth.params.network.size()) {
            throw ValidationError("chain and truth disagree on the number of processes");
        }
        const auto roc = roc_from_scores(probs, truth.params.network.adjacency, !truth.params.network.allow_self_edges);
        report["link_prediction"] = {{"auc", roc.auc}, {"edge_posterior", matrix_to_json(probs)}};
        auto csv = open_out(sibling(out, ".roc.csv"));
        csv << "threshold,fpr,tpr\n";
        for (std::size_t i = 0; i < roc.tpr.size(); ++i) {
            csv << roc.thresholds[i] << ',' << roc.fpr[i] << ',' << roc.tpr[i] << '\n';
        }
        if (!o.scores.empty()) {
            const auto scores = matrix_from_json(read_json_file(o.scores));
            const auto ext = roc_from_scores(scores, truth.params.network.adjacency,
                                             !truth.params.network.allow_self_edges);
            report["link_prediction"]["external_auc"] = ext.auc;
        }
    }
    if (!test_path.empty()) {
        if (!o.test_horizon) {
            throw UsageError("--test-horizon is required with --test");
        }
        const int k = chain.front().network.size();
        const double train_horizon = chain.front().background.horizon;
        const auto train = load_events(pick(o.data, c.io.data, "--data"), train_horizon, k);
        const auto test = load_events(test_path, *o.test_horizon, k);
        const auto r = predictive_log_lik(chain, burn_in, train, test);
        report["event_prediction"] = {{"model_ll", r.model_ll},
                                      {"baseline_ll", r.baseline_ll},
                                      {"num_test_events", r.num_test_events},
                                      {"bits_per_spike", r.bits_per_spike}};
    }
    write_json_file(out, report);
    if (!o.quiet) {
        std::cerr << report.dump(2) << '\n';
    }
    return kOk;
}

int cmd_stability(const Options& o) {
    const auto c = load(o);
    const fs::path out = pick(o.out, c.io.out, "--out");
    const auto& s = c.stability;
    const double rho = s.rho >= 0.0 ? s.rho : max_stable_rho(s.alpha, s.beta, s.num_nodes, s.confidence_sigmas);
    const auto spec = make_stability_spec(s.num_nodes, s.alpha, s.beta, rho);
    Rng rng = make_substream(c.inference.seed, {0x57u});
    const auto radii = empirical_eig_distribution(spec, s.draws, rng);
    const auto theory = theoretical_max_eig(spec);
    const auto summary = summarize_eigs(radii, spec);
    auto csv = open_out(sibling(out, ".draws.csv"));
    csv << "draw,max_abs_eig\n";
    for (std::size_t i = 0; i < radii.size(); ++i) {
        csv << i << ',' << radii[i] << '\n';
    }
    write_json_file(out, {{"num_nodes", s.num_nodes},
                          {"alpha", s.alpha},
                          {"beta", s.beta},
                          {"rho", rho},
                          {"mu_eff", spec.mu_eff},
                          {"sigma_eff", spec.sigma_eff},
                          {"theoretical", {{"mean", theory.mean}, {"sd", theory.sd}, {"bulk_radius", theory.bulk_radius}}},
                          {"criterion", stability_criterion(spec, s.confidence_sigmas)},
                          {"predicted_instability", predicted_instability(spec)},
                          {"empirical",
                           {{"draws", radii.size()},
                            {"mean", summary.mean},
                            {"sd", summary.sd},
                            {"variance_ratio", summary.variance_ratio},
                            {"fraction_unstable", summary.fraction_unstable},
                            {"ks_distance", summary.ks_distance}}}});
    return kOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Network Hawkes processes: simulation, Gibbs inference, evaluation and stability analysis"};
    app.require_subcommand(1);
    Options o;
    auto common = [&](CLI::App* sub) {
        sub->add_option("--config", o.config, "JSON run configuration");
        sub->add_option("--out", o.out, "Output path");
        sub->add_option("--seed", o.seed, "Random seed");
        sub->add_option("--threads", o.threads, "Worker threads")->check(CLI::PositiveNumber);
        sub->add_flag("--quiet", o.quiet, "No progress on standard error");
    };
    auto* sim = app.add_subcommand("simulate", "Draw events and ground truth from the generative model");
    common(sim);
    sim->add_option("--horizon", o.horizon, "Window length in seconds");
    auto* inf = app.add_subcommand("infer", "Run the Gibbs sampler, one JSON record per iteration");
    common(inf);
    inf->add_option("--data", o.data, "Event CSV");
    inf->add_option("--horizon", o.horizon, "Window length in seconds");
    inf->add_option("--iterations", o.iterations, "Total iterations");
    inf->add_option("--burn-in", o.burn_in, "Burn-in (recorded for downstream use)");
    inf->add_flag("--resume", o.resume, "Continue an existing chain file");
    auto* ev = app.add_subcommand("eval", "Link prediction and predictive likelihood from a chain");
    common(ev);
    ev->add_option("--chain", o.chain, "Chain JSONL");
    ev->add_option("--burn-in", o.burn_in, "Samples to discard");
    ev->add_option("--truth", o.truth, "Ground-truth sidecar from simulate");
    ev->add_option("--data", o.data, "Training event CSV");
    ev->add_option("--test", o.test, "Held-out event CSV, times relative to the end of training");
    ev->add_option("--test-horizon", o.test_horizon, "Length of the held-out window");
    ev->add_option("--scores", o.scores, "Matrix JSON of comparison scores for ROC");
    auto* st = app.add_subcommand("stability", "Empirical and predicted maximum eigenvalues");
    common(st);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }
    try {
        if (*sim) {
            return cmd_simulate(o);
        }
        if (*inf) {
            return cmd_infer(o);
        }
        if (*ev) {
            return cmd_eval(o);
        }
        return cmd_stability(o);
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return kUsage;
    } catch (const ExplosionError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kNumerical;
    } catch (const NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << '\n';
        return kNumerical;
    } catch (const DegenerateError& e) {
        std::cerr << "numerical error: " << e.what() << '\n';
        return kNumerical;
    } catch (const ParseError& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return kData;
    } catch (const ValidationError& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return kData;
    } catch (const std::invalid_argument& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return kData;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kData;
    }
}
