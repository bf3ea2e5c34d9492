#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "hetsim/markov.hpp"

namespace hetsim::scenario {

class ScenarioError : public std::runtime_error {
public:
    enum class Kind {
        syntax,            // malformed line, bad number, duplicate section
        unknown_reference, // dangling chain/link/terminal name
        validation,        // structurally sound but violates an invariant
    };

    ScenarioError(Kind kind, std::size_t line, const std::string& msg)
        : std::runtime_error(line ? "line " + std::to_string(line) + ": " + msg : msg),
          kind(kind), line(line) {}

    Kind kind;
    std::size_t line; // 1-based; 0 when not tied to a source line
};

enum class TerminalKind { wired, wireless };

const char* to_string(TerminalKind kind);

struct TransportConfig {
    std::uint64_t packet_size = 1024;   // payload bytes per packet
    std::uint64_t header_overhead = 40; // extra wire bytes per packet
    double rto_initial = 4.0;           // seconds
    double rto_min = 1.0;
    double rto_max = 60.0;
    std::uint32_t max_retransmits = 6;  // resends before the transfer fails
    std::uint32_t initial_window = 4;   // packets in flight
    bool operator==(const TransportConfig&) const = default;
};

struct LinkConfig {
    int id = 0;
    double bandwidth_bps = 0.0;
    double delay_s = 0.0;          // one-way propagation
    std::uint32_t queue_limit = 50; // packets, drop-tail
    double loss = 0.0;              // per-packet drop probability
    bool operator==(const LinkConfig&) const = default;
};

// Workload attached to one active chain state.
struct ServiceProfile {
    std::string service;
    int priority = 0;
    double memory = 0.0;
    double demand = 0.0;
    std::uint64_t file_size = 0; // bytes per transfer
    int destination = 0;         // terminal id
    bool operator==(const ServiceProfile&) const = default;
};

struct ChainConfig {
    TerminalKind kind = TerminalKind::wired;
    markov::ServiceChain chain;
    std::map<std::size_t, ServiceProfile> profiles; // state -> profile, states 1..n-1
    bool operator==(const ChainConfig&) const = default;
};

struct TerminalConfig {
    int id = 0;
    TerminalKind kind = TerminalKind::wired;
    std::string chain;
    int link = 0; // attach link
    double capacity_memory = 0.0;
    double capacity_demand = 0.0;
    bool auto_terminate = true;
    bool multitasking = true;
    bool operator==(const TerminalConfig&) const = default;
};

struct ScenarioConfig {
    double duration = 400.0;
    double warmup = 30.0;
    double state_epoch = 1.0;    // seconds between chain steps
    double metrics_window = 1.0; // metrics sampling interval
    TransportConfig transport;
    std::map<int, LinkConfig> links;
    std::map<std::string, ChainConfig> chains;
    std::vector<TerminalConfig> terminals; // id ascending
    std::vector<std::string> warnings;     // keys accepted but ignored

    const TerminalConfig* find_terminal(int id) const;

    // warnings are advisory and excluded from equality
    bool operator==(const ScenarioConfig& other) const;
};

// Parses the `hetsim-scenario v1` text format and validates the result.
// Unrecognized keys (the legacy ns2-era parameter names among them) are
// collected into config.warnings, not rejected.
ScenarioConfig parse_scenario(std::istream& in);
ScenarioConfig parse_scenario(const std::string& text);
ScenarioConfig parse_scenario_file(const std::string& path);

// Runs the same checks parse_scenario applies, for configs built or mutated
// in code. Errors carry line 0.
void validate_config(const ScenarioConfig& config);

void serialize_scenario(const ScenarioConfig& config, std::ostream& out);
std::string serialize_scenario(const ScenarioConfig& config);

// Applies a `section.key = value` override, e.g. "sim.duration=10",
// "transport.packet_size=512", "link.0.loss=0.05",
// "terminal.3.multitasking=false". The caller re-validates afterwards.
void apply_override(ScenarioConfig& config, const std::string& key, const std::string& value);

enum class ReferenceKind { campus, minimal };

// Bundled scenarios: `campus` is the wired-backbone-plus-access-points
// topology used by the comparison experiments, `minimal` a two-terminal
// smoke-test setup. Chain matrices and profile numbers are synthetic
// (documented in the README); both configs pass validate_config.
ScenarioConfig reference_scenario(ReferenceKind kind);

} // namespace hetsim::scenario
