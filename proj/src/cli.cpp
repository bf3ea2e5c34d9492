#include "hetsim/cli.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include "hetsim/markov.hpp"

namespace hetsim::cli {

namespace {

std::string fixed3(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    return buf;
}

std::string fixed6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

const char* mode_name(RunMode mode) {
    switch (mode) {
    case RunMode::multitask:
        return "multitask";
    case RunMode::single:
        return "single";
    default:
        return "compare";
    }
}

void force_multitasking(scenario::ScenarioConfig& config, bool enabled) {
    for (scenario::TerminalConfig& t : config.terminals)
        t.multitasking = enabled;
}

void print_summary(const netsim::SimulationReport& rep, const scenario::ScenarioConfig& cfg,
                   RunMode mode, std::uint64_t seed, std::ostream& out) {
    out << "run mode=" << mode_name(mode) << " seed=" << seed
        << " duration=" << fixed3(cfg.duration) << " warmup=" << fixed3(cfg.warmup) << "\n";

    const double span = cfg.duration - cfg.warmup;
    const double agg =
        span > 0.0 ? static_cast<double>(rep.delivered_payload_bits) / span : 0.0;
    out << "aggregate_throughput_bps = " << static_cast<long long>(std::llround(agg)) << "\n";

    if (rep.packets_sent > 0)
        out << "goodput_pct = "
            << fixed3(metrics::goodput_pct(rep.packets_acked, rep.packets_sent)) << "\n";
    else
        out << "goodput_pct = absent\n";

    const std::vector<double> util = netsim::network_util_series(rep, cfg);
    if (!util.empty()) {
        double mean = 0.0;
        for (double u : util)
            mean += u;
        mean /= static_cast<double>(util.size());
        out << "mean_channel_util_pct = " << fixed3(mean) << "\n";
        try {
            out << "util_cov = " << fixed6(metrics::coefficient_of_variation(util)) << "\n";
        } catch (const metrics::MetricsError&) {
            out << "util_cov = undefined\n";
        }
    } else {
        out << "mean_channel_util_pct = absent\n";
        out << "util_cov = undefined\n";
    }

    if (!rep.series.completions.empty()) {
        for (const metrics::SizeMean& m : metrics::avg_completion_time(rep.series.completions))
            out << "completion_mean size=" << m.size_bytes
                << " seconds=" << fixed3(m.mean_seconds) << "\n";
    }
    out << "transfers completed=" << rep.completed << " failed=" << rep.failed
        << " cancelled=" << rep.cancelled << "\n";
}

bool write_outputs(const netsim::SimulationReport& rep, const scenario::ScenarioConfig& cfg,
                   const std::string& stem, std::ostream& err) {
    {
        std::ofstream csv(stem + ".csv");
        if (!csv) {
            err << "error: cannot write " << stem << ".csv\n";
            return false;
        }
        write_series_csv(rep.series, cfg, csv);
    }
    std::ofstream comp(stem + ".completions.csv");
    if (!comp) {
        err << "error: cannot write " << stem << ".completions.csv\n";
        return false;
    }
    write_completions_csv(rep.series.completions, comp);
    return true;
}

} // namespace

void write_series_csv(const metrics::MetricsSeries& series,
                      const scenario::ScenarioConfig& config, std::ostream& out) {
    out << "window_start_s,terminal_id,link_id,throughput_bps,goodput_pct,channel_util_pct\n";
    for (std::size_t w = 0; w < series.window_count; ++w) {
        const std::string start = fixed3(series.window_start(w));
        for (const scenario::TerminalConfig& term : config.terminals) {
            const double tput = series.throughput_bps.at(term.id)[w];
            const auto& goodput = series.goodput_pct.at(term.id)[w];
            const double util = series.channel_util_pct.at(term.link)[w];
            out << start << ',' << term.id << ',' << term.link << ','
                << static_cast<long long>(std::llround(tput)) << ','
                << (goodput ? fixed3(*goodput) : std::string()) << ',' << fixed3(util) << '\n';
        }
    }
}

void write_completions_csv(const std::vector<metrics::CompletionRecord>& completions,
                           std::ostream& out) {
    out << "file_size_bytes,completion_s\n";
    for (const metrics::CompletionRecord& rec : completions)
        out << rec.size_bytes << ',' << fixed3(rec.seconds) << '\n';
}

int run_command(const RunRequest& request, std::ostream& out, std::ostream& err) {
    if (request.config_path.empty()) {
        err << "error: missing --config\n";
        return 1;
    }

    scenario::ScenarioConfig config;
    try {
        config = scenario::parse_scenario_file(request.config_path);
        for (const std::string& w : config.warnings)
            err << "warning: " << w << "\n";
        for (const std::string& pair : request.overrides) {
            const auto eq = pair.find('=');
            if (eq == std::string::npos)
                throw scenario::ScenarioError(scenario::ScenarioError::Kind::syntax, 0,
                                              "--set needs key=value, got '" + pair + "'");
            scenario::apply_override(config, pair.substr(0, eq), pair.substr(eq + 1));
        }
        scenario::validate_config(config);
    } catch (const scenario::ScenarioError& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }

    struct Leg {
        RunMode mode;
        std::string stem;
    };
    std::vector<Leg> legs;
    if (request.mode == RunMode::compare) {
        legs.push_back({RunMode::multitask, request.out + ".multi"});
        legs.push_back({RunMode::single, request.out + ".single"});
    } else {
        legs.push_back({request.mode, request.out});
    }

    std::vector<netsim::SimulationReport> reports;
    std::vector<scenario::ScenarioConfig> configs;
    for (const Leg& leg : legs) {
        scenario::ScenarioConfig run_cfg = config;
        force_multitasking(run_cfg, leg.mode == RunMode::multitask);
        try {
            reports.push_back(netsim::run_scenario(run_cfg, request.seed));
        } catch (const netsim::SimulationDiverged& e) {
            err << "error: " << e.what() << "\n";
            return 2;
        }
        configs.push_back(std::move(run_cfg));
    }

    // Outputs only appear once every leg has finished.
    for (std::size_t i = 0; i < legs.size(); ++i) {
        if (!write_outputs(reports[i], configs[i], legs[i].stem, err))
            return 1;
        print_summary(reports[i], configs[i], legs[i].mode, request.seed, out);
    }
    if (request.mode == RunMode::compare) {
        const double span = config.duration - config.warmup;
        const auto bps = [span](const netsim::SimulationReport& r) {
            return span > 0.0
                       ? static_cast<long long>(std::llround(
                             static_cast<double>(r.delivered_payload_bits) / span))
                       : 0LL;
        };
        out << "compare multitask_bps=" << bps(reports[0]) << " single_bps=" << bps(reports[1])
            << "\n";
    }
    return 0;
}

int steady_command(const SteadyRequest& request, std::ostream& out, std::ostream& err) {
    std::ifstream in(request.chain_path);
    if (!in) {
        err << "error: cannot open chain file '" << request.chain_path << "'\n";
        return 1;
    }
    try {
        const markov::ServiceChain chain = markov::parse_chain_text(in);
        const markov::StationaryDistribution pi = markov::steady_state(chain);
        for (std::size_t i = 0; i < chain.size(); ++i)
            out << chain.states()[i] << " " << fixed6(pi.probs[i]) << "\n";
        return 0;
    } catch (const markov::ChainError& e) {
        err << "error: " << e.what() << "\n";
        return e.code == markov::ChainError::Code::non_unique_stationary ? 3 : 1;
    }
}

} // namespace hetsim::cli
