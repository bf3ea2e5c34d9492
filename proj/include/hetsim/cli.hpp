#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "hetsim/metrics.hpp"
#include "hetsim/netsim.hpp"
#include "hetsim/scenario.hpp"

namespace hetsim::cli {

enum class RunMode { multitask, single, compare };

struct RunRequest {
    std::string config_path;
    std::uint64_t seed = 0;
    RunMode mode = RunMode::multitask;
    std::string out = "run"; // output file stem
    std::vector<std::string> overrides; // "section.key=value"
};

struct SteadyRequest {
    std::string chain_path;
};

// Exit codes: 0 ok, 1 validation/usage failure (no output files), 2
// simulation divergence.
int run_command(const RunRequest& request, std::ostream& out, std::ostream& err);

// Exit codes: 0 ok, 1 validation failure, 3 non-unique stationary
// distribution.
int steady_command(const SteadyRequest& request, std::ostream& out, std::ostream& err);

// CSV layouts are versioned output formats: fixed 3 decimals for seconds and
// percentages, integer bits per second, goodput blank in windows with no
// resolved transmissions. One row per (window, terminal); link columns carry
// the terminal's attach link.
void write_series_csv(const metrics::MetricsSeries& series,
                      const scenario::ScenarioConfig& config, std::ostream& out);
void write_completions_csv(const std::vector<metrics::CompletionRecord>& completions,
                           std::ostream& out);

} // namespace hetsim::cli
