#pragma once

#include <Eigen/Core>

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace nethawkes {

struct Event {
    double time;
    int process;
};

/// Time-sorted marked events on K processes over the window [0, horizon].
///
/// Immutable once constructed. The constructor stable-sorts by time, so events
/// sharing a timestamp keep their input order.
class EventSequence {
public:
    EventSequence() = default;

    /// Throws ValidationError if any event is outside [0, horizon] or has a process outside [0, K).
    /// `labels`, when given, names each process index and must have exactly K entries.
    EventSequence(std::vector<Event> events, double horizon, int num_processes,
                  std::vector<std::string> labels = {});

    [[nodiscard]] std::span<const Event> events() const noexcept { return events_; }
    [[nodiscard]] const Event& operator[](std::size_t n) const { return events_[n]; }
    [[nodiscard]] std::size_t size() const noexcept { return events_.size(); }
    [[nodiscard]] bool empty() const noexcept { return events_.empty(); }
    [[nodiscard]] double horizon() const noexcept { return horizon_; }
    [[nodiscard]] int num_processes() const noexcept { return num_processes_; }
    [[nodiscard]] const std::vector<std::string>& labels() const noexcept { return labels_; }

    /// Event times in sorted order, for binary searches over the history.
    [[nodiscard]] std::span<const double> times() const noexcept { return times_; }
    [[nodiscard]] std::vector<long> counts_per_process() const;

private:
    std::vector<Event> events_;
    std::vector<double> times_;
    double horizon_{1.0};
    int num_processes_{1};
    std::vector<std::string> labels_;
};

/// Reads the `time,process` CSV. Labels that are all nonnegative integers are
/// used as indices directly; otherwise labels are sorted lexicographically and
/// numbered in that order. K defaults to the number of processes implied by the labels.
[[nodiscard]] EventSequence load_events(const std::filesystem::path& path, double horizon,
                                        std::optional<int> num_processes = std::nullopt);

/// Writes the sequence with full round-trip precision, using its labels when present.
void save_events(const EventSequence& seq, const std::filesystem::path& path);

struct BinnedCounts {
    Eigen::MatrixXi counts;  // K x M
    double bin_width;
};

/// Bin m covers [mT/M, (m+1)T/M); an event at exactly T lands in bin M-1.
[[nodiscard]] BinnedCounts bin_events(const EventSequence& seq, int num_bins);

/// Splits at t_split: events strictly before go to the first sequence, the rest
/// are shifted by -t_split into the second.
[[nodiscard]] std::pair<EventSequence, EventSequence> split_train_test(const EventSequence& seq,
                                                                      double t_split);

/// Maps every event's process through `process_map` into a sequence on `num_groups` processes.
[[nodiscard]] EventSequence relabel(const EventSequence& seq, std::span<const int> process_map,
                                    int num_groups);

} // namespace nethawkes
