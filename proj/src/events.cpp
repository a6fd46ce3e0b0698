#include "nethawkes/events.hpp"

#include "nethawkes/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

namespace nethawkes {

EventSequence::EventSequence(std::vector<Event> events, double horizon, int num_processes,
                             std::vector<std::string> labels)
    : events_(std::move(events)),
      horizon_(horizon),
      num_processes_(num_processes),
      labels_(std::move(labels)) {
    if (!(horizon_ > 0.0) || !std::isfinite(horizon_)) {
        throw ValidationError("horizon must be positive and finite");
    }
    if (num_processes_ < 1) {
        throw ValidationError("number of processes must be positive");
    }
    if (!labels_.empty() && static_cast<int>(labels_.size()) != num_processes_) {
        throw ValidationError("label list must have one entry per process");
    }
    for (const auto& e : events_) {
        if (!std::isfinite(e.time) || e.time < 0.0) {
            throw ValidationError("event time must be finite and nonnegative");
        }
        if (e.time > horizon_) {
            throw ValidationError("event time " + std::to_string(e.time) + " exceeds horizon " +
                                  std::to_string(horizon_));
        }
        if (e.process < 0 || e.process >= num_processes_) {
            throw ValidationError("process index " + std::to_string(e.process) + " outside [0, " +
                                  std::to_string(num_processes_) + ")");
        }
    }
    std::stable_sort(events_.begin(), events_.end(),
                     [](const Event& a, const Event& b) { return a.time < b.time; });
    times_.reserve(events_.size());
    for (const auto& e : events_) {
        times_.push_back(e.time);
    }
}

std::vector<long> EventSequence::counts_per_process() const {
    std::vector<long> counts(static_cast<std::size_t>(num_processes_), 0);
    for (const auto& e : events_) {
        ++counts[static_cast<std::size_t>(e.process)];
    }
    return counts;
}

namespace {

std::string trim(std::string s) {
    const auto not_space = [](unsigned char c) { return !std::isspace(c); };
    s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
    s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
    return s;
}

std::optional<int> as_index(const std::string& label) {
    int value = 0;
    const auto* first = label.data();
    const auto* last = label.data() + label.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last || value < 0 || label.empty()) {
        return std::nullopt;
    }
    return value;
}

} // namespace

EventSequence load_events(const std::filesystem::path& path, double horizon,
                          std::optional<int> num_processes) {
    std::ifstream in(path);
    if (!in) {
        throw std::invalid_argument("cannot open event file " + path.string());
    }
    std::string line;
    std::size_t line_no = 0;
    std::vector<std::pair<double, std::string>> rows;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (line_no == 1 && line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) {
            line.erase(0, 3);
        }
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (trim(line).empty()) {
            continue;
        }
        if (!header_seen) {
            header_seen = true;
            if (trim(line) != "time,process") {
                throw ParseError("expected header 'time,process'", line_no);
            }
            continue;
        }
        const auto comma = line.find(',');
        if (comma == std::string::npos || line.find(',', comma + 1) != std::string::npos) {
            throw ParseError("expected exactly two fields", line_no);
        }
        const std::string time_field = trim(line.substr(0, comma));
        std::string label = trim(line.substr(comma + 1));
        if (label.empty()) {
            throw ParseError("empty process label", line_no);
        }
        double t = 0.0;
        try {
            std::size_t used = 0;
            t = std::stod(time_field, &used);
            if (used != time_field.size()) {
                throw std::invalid_argument("trailing characters");
            }
        } catch (const std::exception&) {
            throw ParseError("cannot parse time '" + time_field + "'", line_no);
        }
        if (!std::isfinite(t)) {
            throw ParseError("non-finite time", line_no);
        }
        rows.emplace_back(t, std::move(label));
    }

    const bool integer_labels = std::all_of(rows.begin(), rows.end(), [](const auto& r) {
        return as_index(r.second).has_value();
    });

    std::vector<Event> events;
    events.reserve(rows.size());
    std::vector<std::string> labels;
    int implied = 0;
    if (integer_labels) {
        for (const auto& [t, label] : rows) {
            const int idx = *as_index(label);
            implied = std::max(implied, idx + 1);
            events.push_back({t, idx});
        }
    } else {
        std::map<std::string, int> index;
        for (const auto& r : rows) {
            index.emplace(r.second, 0);
        }
        int next = 0;
        for (auto& [label, idx] : index) {
            idx = next++;
            labels.push_back(label);
        }
        implied = next;
        for (const auto& [t, label] : rows) {
            events.push_back({t, index.at(label)});
        }
    }
    const int k = num_processes.value_or(std::max(implied, 1));
    if (integer_labels) {
        labels.clear();
        for (int i = 0; i < k; ++i) {
            labels.push_back(std::to_string(i));
        }
    } else if (k != implied) {
        if (k < implied) {
            throw ValidationError("file has " + std::to_string(implied) + " distinct labels but K=" +
                                  std::to_string(k));
        }
        for (int i = implied; i < k; ++i) {
            labels.push_back("__unused_" + std::to_string(i));
        }
    }
    if (labels.empty()) {
        for (int i = 0; i < k; ++i) {
            labels.push_back(std::to_string(i));
        }
    }
    return EventSequence(std::move(events), horizon, k, std::move(labels));
}

void save_events(const EventSequence& seq, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) {
        throw std::invalid_argument("cannot write event file " + path.string());
    }
    out << "time,process\n";
    out << std::setprecision(17);
    for (const auto& e : seq.events()) {
        out << e.time << ',';
        if (seq.labels().empty()) {
            out << e.process;
        } else {
            out << seq.labels()[static_cast<std::size_t>(e.process)];
        }
        out << '\n';
    }
}

BinnedCounts bin_events(const EventSequence& seq, int num_bins) {
    if (num_bins <= 0) {
        throw std::invalid_argument("bin count must be positive");
    }
    BinnedCounts out{Eigen::MatrixXi::Zero(seq.num_processes(), num_bins),
                     seq.horizon() / num_bins};
    for (const auto& e : seq.events()) {
        auto m = static_cast<long>(std::floor(e.time * num_bins / seq.horizon()));
        m = std::clamp(m, 0L, static_cast<long>(num_bins) - 1);
        ++out.counts(e.process, m);
    }
    return out;
}

std::pair<EventSequence, EventSequence> split_train_test(const EventSequence& seq, double t_split) {
    if (!(t_split > 0.0) || !(t_split < seq.horizon())) {
        throw std::invalid_argument("split time must lie strictly inside (0, T)");
    }
    std::vector<Event> train;
    std::vector<Event> test;
    for (const auto& e : seq.events()) {
        if (e.time < t_split) {
            train.push_back(e);
        } else {
            test.push_back({e.time - t_split, e.process});
        }
    }
    return {EventSequence(std::move(train), t_split, seq.num_processes(), seq.labels()),
            EventSequence(std::move(test), seq.horizon() - t_split, seq.num_processes(),
                          seq.labels())};
}

EventSequence relabel(const EventSequence& seq, std::span<const int> process_map, int num_groups) {
    if (static_cast<int>(process_map.size()) != seq.num_processes()) {
        throw std::invalid_argument("process map must cover every process");
    }
    std::vector<Event> events;
    events.reserve(seq.size());
    for (const auto& e : seq.events()) {
        events.push_back({e.time, process_map[static_cast<std::size_t>(e.process)]});
    }
    return EventSequence(std::move(events), seq.horizon(), num_groups);
}

} // namespace nethawkes
