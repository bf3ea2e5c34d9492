#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace hetsim::metrics {

class MetricsError : public std::runtime_error {
public:
    enum class Code {
        non_positive_interval,
        acked_exceeds_transmitted,
        no_transmissions,
        non_positive_nominal,
        empty_group,
        zero_mean,
        empty_series,
    };

    MetricsError(Code code, std::string msg) : std::runtime_error(std::move(msg)), code(code) {}

    Code code;
};

// First-delivery application bits per second. Retransmitted duplicates are
// the caller's job to exclude from delivered_bits.
double throughput_bps(std::uint64_t delivered_bits, double interval_s);

// 100 * acked / transmitted. A window with zero transmissions has no goodput
// (reported as absent upstream), so transmitted == 0 is an error here.
double goodput_pct(std::uint64_t acked_packets, std::uint64_t transmitted_packets);

// 100 * achieved / nominal, capped at 100. `achieved` counts every bit on the
// wire: payload, header overhead and retransmissions.
double channel_efficiency_pct(double achieved_bps, double nominal_bps);

struct CompletionRecord {
    std::uint64_t size_bytes = 0;
    double seconds = 0.0;
};

struct SizeMean {
    std::uint64_t size_bytes = 0;
    double mean_seconds = 0.0;
};

// Mean completion time per distinct file size, sizes ascending.
std::vector<SizeMean> avg_completion_time(std::span<const CompletionRecord> records);

// Population standard deviation / mean.
double coefficient_of_variation(std::span<const double> series);

// Windowed measurement series for one simulation run. Windows tile
// [start, start + duration) in steps of window_s; the last window may be
// shorter. Absent goodput marks a window with no resolved transmissions.
struct MetricsSeries {
    double start_s = 0.0;
    double window_s = 1.0;
    std::size_t window_count = 0;
    double last_window_s = 0.0; // length of the final window

    std::map<int, std::vector<double>> throughput_bps;               // terminal id ->
    std::map<int, std::vector<std::optional<double>>> goodput_pct;   // terminal id ->
    std::map<int, std::vector<double>> channel_util_pct;             // link id ->
    std::vector<CompletionRecord> completions;

    double window_start(std::size_t w) const { return start_s + static_cast<double>(w) * window_s; }
    double window_length(std::size_t w) const {
        return (w + 1 == window_count) ? last_window_s : window_s;
    }
};

} // namespace hetsim::metrics
