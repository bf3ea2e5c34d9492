#include "hetsim/metrics.hpp"

#include <algorithm>
#include <cmath>

namespace hetsim::metrics {

double throughput_bps(std::uint64_t delivered_bits, double interval_s) {
    if (!(interval_s > 0.0)) {
        throw MetricsError(MetricsError::Code::non_positive_interval,
                           "throughput interval must be positive");
    }
    return static_cast<double>(delivered_bits) / interval_s;
}

double goodput_pct(std::uint64_t acked_packets, std::uint64_t transmitted_packets) {
    if (transmitted_packets == 0) {
        throw MetricsError(MetricsError::Code::no_transmissions,
                           "goodput undefined without transmissions");
    }
    if (acked_packets > transmitted_packets) {
        throw MetricsError(MetricsError::Code::acked_exceeds_transmitted,
                           "acked packets exceed transmitted packets");
    }
    return 100.0 * static_cast<double>(acked_packets) / static_cast<double>(transmitted_packets);
}

double channel_efficiency_pct(double achieved_bps, double nominal_bps) {
    if (!(nominal_bps > 0.0)) {
        throw MetricsError(MetricsError::Code::non_positive_nominal,
                           "nominal bandwidth must be positive");
    }
    const double pct = 100.0 * achieved_bps / nominal_bps;
    return std::min(pct, 100.0);
}

std::vector<SizeMean> avg_completion_time(std::span<const CompletionRecord> records) {
    if (records.empty()) {
        throw MetricsError(MetricsError::Code::empty_group, "no completion records");
    }
    std::map<std::uint64_t, std::pair<double, std::size_t>> groups; // size -> (sum, count)
    for (const CompletionRecord& rec : records) {
        auto& [sum, count] = groups[rec.size_bytes];
        sum += rec.seconds;
        ++count;
    }
    std::vector<SizeMean> out;
    out.reserve(groups.size());
    for (const auto& [size, agg] : groups) {
        out.push_back({size, agg.first / static_cast<double>(agg.second)});
    }
    return out;
}

double coefficient_of_variation(std::span<const double> series) {
    if (series.empty()) {
        throw MetricsError(MetricsError::Code::empty_series, "empty series");
    }
    double mean = 0.0;
    for (double v : series) mean += v;
    mean /= static_cast<double>(series.size());
    if (mean == 0.0) {
        throw MetricsError(MetricsError::Code::zero_mean, "series mean is zero");
    }
    double var = 0.0;
    for (double v : series) {
        const double d = v - mean;
        var += d * d;
    }
    var /= static_cast<double>(series.size());
    return std::sqrt(var) / mean;
}

} // namespace hetsim::metrics
