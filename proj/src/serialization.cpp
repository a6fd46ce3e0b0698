#include "nethawkes/serialization.hpp"

#include "nethawkes/errors.hpp"

#include <limits>
#include <sstream>
#include <stdexcept>

namespace nethawkes {

namespace {

template <typename Matrix>
Json dense_to_json(const Matrix& m) {
    Json data = Json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            data.push_back(m(i, j));
        }
    }
    return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(data)}};
}

template <typename Matrix, typename Scalar>
Matrix dense_from_json(const Json& j) {
    const auto rows = j.at("rows").get<Eigen::Index>();
    const auto cols = j.at("cols").get<Eigen::Index>();
    const auto& data = j.at("data");
    if (rows < 0 || cols < 0 || data.size() != static_cast<std::size_t>(rows * cols)) {
        throw ValidationError("matrix data length does not match rows x cols");
    }
    Matrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        for (Eigen::Index c = 0; c < cols; ++c) {
            m(i, c) = data[static_cast<std::size_t>(i * cols + c)].get<Scalar>();
        }
    }
    return m;
}

const char* kind_name(GpKernelSpec::Kind k) {
    switch (k) {
    case GpKernelSpec::Kind::periodic:
        return "periodic";
    case GpKernelSpec::Kind::squared_exponential:
        return "squared_exponential";
    case GpKernelSpec::Kind::quadratic:
        return "quadratic";
    case GpKernelSpec::Kind::sum:
        return "sum";
    }
    return "periodic";
}

} // namespace

Json matrix_to_json(const Eigen::MatrixXd& m) { return dense_to_json(m); }
Json matrix_to_json(const Eigen::MatrixXi& m) { return dense_to_json(m); }
Eigen::MatrixXd matrix_from_json(const Json& j) { return dense_from_json<Eigen::MatrixXd, double>(j); }
Eigen::MatrixXi int_matrix_from_json(const Json& j) { return dense_from_json<Eigen::MatrixXi, int>(j); }

Json kernel_to_json(const GpKernelSpec& spec) {
    Json j{{"kind", kind_name(spec.kind)}};
    if (spec.kind == GpKernelSpec::Kind::sum) {
        j["components"] = Json::array();
        for (const auto& c : spec.components) {
            j["components"].push_back(kernel_to_json(c));
        }
        return j;
    }
    j["length_scale"] = spec.length_scale;
    j["variance"] = spec.variance;
    if (spec.kind == GpKernelSpec::Kind::periodic) {
        j["period"] = spec.period;
    }
    return j;
}

GpKernelSpec kernel_from_json(const Json& j) {
    GpKernelSpec spec;
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "periodic") {
        spec.kind = GpKernelSpec::Kind::periodic;
        spec.period = j.at("period").get<double>();
    } else if (kind == "squared_exponential") {
        spec.kind = GpKernelSpec::Kind::squared_exponential;
    } else if (kind == "quadratic") {
        spec.kind = GpKernelSpec::Kind::quadratic;
    } else if (kind == "sum") {
        spec.kind = GpKernelSpec::Kind::sum;
        for (const auto& c : j.at("components")) {
            spec.components.push_back(kernel_from_json(c));
        }
        validate(spec);
        return spec;
    } else {
        throw ValidationError("unknown kernel kind '" + kind + "'");
    }
    spec.length_scale = j.value("length_scale", spec.length_scale);
    spec.variance = j.value("variance", spec.variance);
    validate(spec);
    return spec;
}

Json network_to_json(const NetworkState& net) {
    return {{"num_processes", net.size()},
            {"dt_max", net.dt_max},
            {"allow_self_edges", net.allow_self_edges},
            {"adjacency", matrix_to_json(net.adjacency)},
            {"weights", matrix_to_json(net.weights)},
            {"impulse_mu", matrix_to_json(net.impulse_mu)},
            {"impulse_tau", matrix_to_json(net.impulse_tau)}};
}

NetworkState network_from_json(const Json& j) {
    NetworkState net;
    net.dt_max = j.at("dt_max").get<double>();
    net.allow_self_edges = j.value("allow_self_edges", false);
    net.adjacency = int_matrix_from_json(j.at("adjacency"));
    net.weights = matrix_from_json(j.at("weights"));
    net.impulse_mu = matrix_from_json(j.at("impulse_mu"));
    net.impulse_tau = matrix_from_json(j.at("impulse_tau"));
    validate(net);
    return net;
}

Json background_to_json(const BackgroundModel& model) {
    Json j{{"horizon", model.horizon}};
    if (model.kind == BackgroundKind::constant) {
        j["kind"] = "constant";
        j["rates"] = model.rates;
        j["rate_prior"] = {{"shape", model.rate_prior.shape}, {"rate", model.rate_prior.rate}};
        return j;
    }
    j["kind"] = "lgcp";
    j["offsets"] = model.offsets;
    j["scales"] = model.scales;
    j["grid_y"] = model.grid_y;
    j["kernel"] = kernel_to_json(model.kernel);
    j["offset_prior"] = {{"log_mean", model.offset_prior.log_mean}, {"log_sd", model.offset_prior.log_sd}};
    j["scale_prior"] = {{"log_mean", model.scale_prior.log_mean}, {"log_sd", model.scale_prior.log_sd}};
    j["interpolation"] = model.interpolation == RateInterpolation::linear_rate ? "linear_rate" : "linear_log";
    j["proposal_sd"] = model.proposal_sd;
    return j;
}

BackgroundModel background_from_json(const Json& j) {
    BackgroundModel model;
    model.horizon = j.at("horizon").get<double>();
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "constant") {
        model.kind = BackgroundKind::constant;
        model.rates = j.at("rates").get<std::vector<double>>();
        if (j.contains("rate_prior")) {
            model.rate_prior = {j["rate_prior"].at("shape").get<double>(), j["rate_prior"].at("rate").get<double>()};
        }
    } else if (kind == "lgcp") {
        model.kind = BackgroundKind::lgcp;
        model.offsets = j.at("offsets").get<std::vector<double>>();
        model.scales = j.at("scales").get<std::vector<double>>();
        model.grid_y = j.at("grid_y").get<std::vector<double>>();
        model.kernel = kernel_from_json(j.at("kernel"));
        const auto& op = j.at("offset_prior");
        model.offset_prior = {op.at("log_mean").get<double>(), op.at("log_sd").get<double>()};
        const auto& sp = j.at("scale_prior");
        model.scale_prior = {sp.at("log_mean").get<double>(), sp.at("log_sd").get<double>()};
        const auto interp = j.value("interpolation", std::string("linear_rate"));
        if (interp != "linear_rate" && interp != "linear_log") {
            throw ValidationError("unknown interpolation '" + interp + "'");
        }
        model.interpolation = interp == "linear_rate" ? RateInterpolation::linear_rate : RateInterpolation::linear_log;
        model.proposal_sd = j.value("proposal_sd", model.proposal_sd);
    } else {
        throw ValidationError("unknown background kind '" + kind + "'");
    }
    validate(model);
    return model;
}

Json graph_prior_to_json(const GraphPrior& prior) {
    Json j{{"kind", to_string(prior.kind)},
           {"num_nodes", prior.num_nodes},
           {"allow_self_edges", prior.allow_self_edges},
           {"rho", prior.rho},
           {"rho_prior", {{"a", prior.rho_prior.a}, {"b", prior.rho_prior.b}}},
           {"resample_rho", prior.resample_rho}};
    if (prior.kind == GraphPriorKind::latent_distance) {
        j["locations"] = matrix_to_json(prior.locations);
        j["tau"] = prior.tau;
        j["tau_prior"] = {{"log_mean", prior.tau_prior.log_mean}, {"log_sd", prior.tau_prior.log_sd}};
        j["location_proposal_sd"] = prior.location_proposal_sd;
        j["tau_slice_width"] = prior.tau_slice_width;
    }
    if (prior.kind == GraphPriorKind::sbm) {
        j["block_probs"] = matrix_to_json(prior.block_probs);
        j["block_prior"] = {{"a", prior.block_prior.a}, {"b", prior.block_prior.b}};
        j["block_labels"] = prior.block_labels;
        j["block_weights"] = prior.block_weights;
        j["block_concentration"] = prior.block_concentration;
    }
    return j;
}

GraphPrior graph_prior_from_json(const Json& j) {
    GraphPrior p;
    const auto kind = j.at("kind").get<std::string>();
    try {
        p.kind = graph_prior_kind_from_string(kind);
    } catch (const std::invalid_argument& e) {
        throw ValidationError(e.what());
    }
    p.num_nodes = j.at("num_nodes").get<int>();
    p.allow_self_edges = j.value("allow_self_edges", false);
    p.rho = j.value("rho", p.rho);
    if (j.contains("rho_prior")) {
        p.rho_prior = {j["rho_prior"].at("a").get<double>(), j["rho_prior"].at("b").get<double>()};
    }
    p.resample_rho = j.value("resample_rho", p.resample_rho);
    if (p.kind == GraphPriorKind::latent_distance) {
        p.locations = matrix_from_json(j.at("locations"));
        p.tau = j.at("tau").get<double>();
        const auto& tp = j.at("tau_prior");
        p.tau_prior = {tp.at("log_mean").get<double>(), tp.at("log_sd").get<double>()};
        p.location_proposal_sd = j.value("location_proposal_sd", p.location_proposal_sd);
        p.tau_slice_width = j.value("tau_slice_width", p.tau_slice_width);
    }
    if (p.kind == GraphPriorKind::sbm) {
        p.block_probs = matrix_from_json(j.at("block_probs"));
        const auto& bp = j.at("block_prior");
        p.block_prior = {bp.at("a").get<double>(), bp.at("b").get<double>()};
        p.block_labels = j.at("block_labels").get<std::vector<int>>();
        p.block_weights = j.at("block_weights").get<std::vector<double>>();
        p.block_concentration = j.at("block_concentration").get<std::vector<double>>();
    }
    validate(p);
    return p;
}

Json parents_to_json(const ParentAssignment& parents) {
    Json out = Json::array();
    for (const int z : parents.parent) {
        out.push_back(z == kBackgroundParent ? 0 : z + 1);
    }
    return out;
}

ParentAssignment parents_from_json(const Json& j) {
    ParentAssignment p;
    p.parent.reserve(j.size());
    for (const auto& v : j) {
        const int z = v.get<int>();
        if (z < 0) {
            throw ValidationError("parent indices must be nonnegative");
        }
        p.parent.push_back(z == 0 ? kBackgroundParent : z - 1);
    }
    return p;
}

Json sample_to_json(const ChainSample& s) {
    Json j{{"iteration", s.iteration},
           {"loglik", s.loglik},
           {"beta_w0", s.beta_w0},
           {"network", network_to_json(s.network)},
           {"background", background_to_json(s.background)},
           {"graph_prior", graph_prior_to_json(s.graph_prior)},
           {"parents", parents_to_json(s.parents)}};
    if (!s.process_map.empty()) {
        j["process_map"] = s.process_map;
    }
    return j;
}

ChainSample sample_from_json(const Json& j) {
    ChainSample s;
    s.iteration = j.at("iteration").get<long>();
    s.loglik = j.at("loglik").is_null() ? -std::numeric_limits<double>::infinity() : j.at("loglik").get<double>();
    s.beta_w0 = j.at("beta_w0").get<double>();
    s.network = network_from_json(j.at("network"));
    s.background = background_from_json(j.at("background"));
    s.graph_prior = graph_prior_from_json(j.at("graph_prior"));
    s.parents = parents_from_json(j.at("parents"));
    if (j.contains("process_map")) {
        s.process_map = j["process_map"].get<std::vector<int>>();
    }
    return s;
}

ChainWriter::ChainWriter(const std::filesystem::path& path, bool append)
    : out_(path, append ? std::ios::app : std::ios::trunc) {
    if (!out_) {
        throw std::runtime_error("cannot open chain file " + path.string());
    }
}

void ChainWriter::write(const ChainSample& sample) {
    out_ << sample_to_json(sample).dump() << '\n';
    out_.flush();
}

std::vector<ChainSample> read_chain(const std::filesystem::path& path, bool allow_truncated_tail) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open chain file " + path.string());
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    const std::string text = buffer.str();
    std::vector<ChainSample> chain;
    std::size_t pos = 0;
    std::size_t line_no = 0;
    while (pos < text.size()) {
        const auto end = text.find('\n', pos);
        const bool terminated = end != std::string::npos;
        const std::string line = text.substr(pos, terminated ? end - pos : std::string::npos);
        pos = terminated ? end + 1 : text.size();
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        try {
            chain.push_back(sample_from_json(Json::parse(line)));
        } catch (const std::exception& e) {
            if (allow_truncated_tail && !terminated) {
                break;
            }
            throw ParseError(std::string("bad chain record: ") + e.what(), line_no);
        }
    }
    return chain;
}

void save_truth(const std::filesystem::path& path, const SimulationTruth& truth) {
    write_json_file(path, {{"network", network_to_json(truth.params.network)},
                           {"background", background_to_json(truth.params.background)},
                           {"parents", parents_to_json(truth.parents)},
                           {"spectral_radius", truth.spectral_radius}});
}

SimulationTruth load_truth(const std::filesystem::path& path) {
    const auto j = read_json_file(path);
    SimulationTruth t;
    t.params.network = network_from_json(j.at("network"));
    t.params.background = background_from_json(j.at("background"));
    t.parents = parents_from_json(j.at("parents"));
    t.spectral_radius = j.value("spectral_radius", 0.0);
    return t;
}

Json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open " + path.string());
    }
    try {
        return Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw ValidationError(path.string() + ": " + e.what());
    }
}

void write_json_file(const std::filesystem::path& path, const Json& j) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) {
        throw std::runtime_error("cannot write " + path.string());
    }
    out << j.dump(2) << '\n';
}

} // namespace nethawkes
