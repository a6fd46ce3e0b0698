#pragma once

#include "nethawkes/gibbs.hpp"
#include "nethawkes/model.hpp"

#include <json.hpp>

#include <Eigen/Core>

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace nethawkes {

using Json = nlohmann::json;

/// {"rows": r, "cols": c, "data": [row-major values]}
[[nodiscard]] Json matrix_to_json(const Eigen::MatrixXd& m);
[[nodiscard]] Json matrix_to_json(const Eigen::MatrixXi& m);
[[nodiscard]] Eigen::MatrixXd matrix_from_json(const Json& j);
[[nodiscard]] Eigen::MatrixXi int_matrix_from_json(const Json& j);

[[nodiscard]] Json kernel_to_json(const GpKernelSpec& spec);
[[nodiscard]] GpKernelSpec kernel_from_json(const Json& j);

[[nodiscard]] Json network_to_json(const NetworkState& net);
[[nodiscard]] NetworkState network_from_json(const Json& j);

[[nodiscard]] Json background_to_json(const BackgroundModel& model);
[[nodiscard]] BackgroundModel background_from_json(const Json& j);

[[nodiscard]] Json graph_prior_to_json(const GraphPrior& prior);
[[nodiscard]] GraphPrior graph_prior_from_json(const Json& j);

/// Parents are written 1-based with 0 for the background.
[[nodiscard]] Json parents_to_json(const ParentAssignment& parents);
[[nodiscard]] ParentAssignment parents_from_json(const Json& j);

[[nodiscard]] Json sample_to_json(const ChainSample& sample);
[[nodiscard]] ChainSample sample_from_json(const Json& j);

/// Appends one compact JSON record per line, flushing after each.
class ChainWriter {
public:
    ChainWriter(const std::filesystem::path& path, bool append);
    void write(const ChainSample& sample);

private:
    std::ofstream out_;
};

/// Throws ParseError naming the offending line. With `allow_truncated_tail`, an
/// unparseable final line without a trailing newline (an interrupted write) is dropped.
[[nodiscard]] std::vector<ChainSample> read_chain(const std::filesystem::path& path,
                                                  bool allow_truncated_tail = false);

/// Ground truth written next to simulated events.
struct SimulationTruth {
    HawkesParams params;
    ParentAssignment parents;
    double spectral_radius{0.0};
};

void save_truth(const std::filesystem::path& path, const SimulationTruth& truth);
[[nodiscard]] SimulationTruth load_truth(const std::filesystem::path& path);

[[nodiscard]] Json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const Json& j);

} // namespace nethawkes
