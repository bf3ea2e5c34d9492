#include "hetsim/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <utility>

namespace hetsim::scenario {

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_commas(std::string_view s) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(',', start);
        if (pos == std::string_view::npos) {
            parts.push_back(trim(s.substr(start)));
            return parts;
        }
        parts.push_back(trim(s.substr(start, pos - start)));
        start = pos + 1;
    }
}

// Thrown by the typed setters below; the caller knows the line number.
struct BadValue {
    std::string what;
};

double to_double(const std::string& v) {
    double out = 0.0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size())
        throw BadValue{"expected a number, got '" + v + "'"};
    return out;
}

template <typename Int>
Int to_integer(const std::string& v) {
    Int out = 0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size())
        throw BadValue{"expected an integer, got '" + v + "'"};
    return out;
}

bool to_bool(const std::string& v) {
    if (v == "true")
        return true;
    if (v == "false")
        return false;
    throw BadValue{"expected true or false, got '" + v + "'"};
}

TerminalKind to_kind(const std::string& v) {
    if (v == "wired")
        return TerminalKind::wired;
    if (v == "wireless")
        return TerminalKind::wireless;
    throw BadValue{"expected wired or wireless, got '" + v + "'"};
}

std::string fmt(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

// Setters shared by the file parser and apply_override. Return false for an
// unrecognized key.
bool set_sim_key(ScenarioConfig& c, const std::string& key, const std::string& value) {
    if (key == "duration")
        c.duration = to_double(value);
    else if (key == "warmup")
        c.warmup = to_double(value);
    else if (key == "state_epoch")
        c.state_epoch = to_double(value);
    else if (key == "metrics_window")
        c.metrics_window = to_double(value);
    else
        return false;
    return true;
}

bool set_transport_key(TransportConfig& t, const std::string& key, const std::string& value) {
    if (key == "packet_size")
        t.packet_size = to_integer<std::uint64_t>(value);
    else if (key == "header_overhead")
        t.header_overhead = to_integer<std::uint64_t>(value);
    else if (key == "rto_initial")
        t.rto_initial = to_double(value);
    else if (key == "rto_min")
        t.rto_min = to_double(value);
    else if (key == "rto_max")
        t.rto_max = to_double(value);
    else if (key == "max_retransmits")
        t.max_retransmits = to_integer<std::uint32_t>(value);
    else if (key == "initial_window")
        t.initial_window = to_integer<std::uint32_t>(value);
    else
        return false;
    return true;
}

bool set_link_key(LinkConfig& l, const std::string& key, const std::string& value) {
    if (key == "bandwidth")
        l.bandwidth_bps = to_double(value);
    else if (key == "delay")
        l.delay_s = to_double(value);
    else if (key == "queue_limit")
        l.queue_limit = to_integer<std::uint32_t>(value);
    else if (key == "loss")
        l.loss = to_double(value);
    else
        return false;
    return true;
}

bool set_profile_key(ServiceProfile& p, const std::string& key, const std::string& value) {
    if (key == "service")
        p.service = value;
    else if (key == "priority")
        p.priority = to_integer<int>(value);
    else if (key == "memory")
        p.memory = to_double(value);
    else if (key == "demand")
        p.demand = to_double(value);
    else if (key == "file_size")
        p.file_size = to_integer<std::uint64_t>(value);
    else if (key == "destination")
        p.destination = to_integer<int>(value);
    else
        return false;
    return true;
}

bool set_terminal_key(TerminalConfig& t, const std::string& key, const std::string& value) {
    if (key == "kind")
        t.kind = to_kind(value);
    else if (key == "chain")
        t.chain = value;
    else if (key == "link")
        t.link = to_integer<int>(value);
    else if (key == "capacity_memory")
        t.capacity_memory = to_double(value);
    else if (key == "capacity_demand")
        t.capacity_demand = to_double(value);
    else if (key == "auto_terminate")
        t.auto_terminate = to_bool(value);
    else if (key == "multitasking")
        t.multitasking = to_bool(value);
    else
        return false;
    return true;
}

// Declaration lines for post-parse validation messages; all zero when a
// config was assembled in code.
struct LineInfo {
    std::size_t sim = 0;
    std::size_t transport = 0;
    std::map<int, std::size_t> link;
    std::map<int, std::size_t> terminal;
    std::map<std::string, std::size_t> chain;
    std::map<std::pair<std::string, std::size_t>, std::size_t> profile;

    template <typename Map, typename Key>
    static std::size_t get(const Map& m, const Key& k) {
        auto it = m.find(k);
        return it == m.end() ? 0 : it->second;
    }
};

[[noreturn]] void fail(ScenarioError::Kind kind, std::size_t line, const std::string& msg) {
    throw ScenarioError(kind, line, msg);
}

void run_validation(const ScenarioConfig& c, const LineInfo& li) {
    using Kind = ScenarioError::Kind;

    if (c.terminals.empty())
        fail(Kind::validation, 0, "scenario declares no terminals");

    if (c.duration < 0.0)
        fail(Kind::validation, li.sim, "duration must be >= 0");
    if (c.warmup < 0.0)
        fail(Kind::validation, li.sim, "warmup must be >= 0");
    if (c.warmup > c.duration)
        fail(Kind::validation, li.sim, "warmup exceeds duration");
    if (!(c.state_epoch > 0.0))
        fail(Kind::validation, li.sim, "state_epoch must be positive");
    if (!(c.metrics_window > 0.0))
        fail(Kind::validation, li.sim, "metrics_window must be positive");

    const TransportConfig& t = c.transport;
    if (t.packet_size < 1)
        fail(Kind::validation, li.transport, "packet_size must be at least 1 byte");
    if (!(t.rto_min > 0.0))
        fail(Kind::validation, li.transport, "rto_min must be positive");
    if (t.rto_max < t.rto_min)
        fail(Kind::validation, li.transport, "rto_max below rto_min");
    if (!(t.rto_initial > 0.0))
        fail(Kind::validation, li.transport, "rto_initial must be positive");
    if (t.max_retransmits > 15)
        fail(Kind::validation, li.transport, "max_retransmits above the supported limit of 15");
    if (t.initial_window < 1)
        fail(Kind::validation, li.transport, "initial_window must be at least 1");

    for (const auto& [id, link] : c.links) {
        const std::size_t line = LineInfo::get(li.link, id);
        if (link.id != id)
            fail(Kind::validation, line, "link id field disagrees with its map key");
        if (id < 0)
            fail(Kind::validation, line, "link id must be >= 0");
        if (!(link.bandwidth_bps > 0.0))
            fail(Kind::validation, line, "link " + std::to_string(id) + ": bandwidth must be positive");
        if (link.delay_s < 0.0)
            fail(Kind::validation, line, "link " + std::to_string(id) + ": delay must be >= 0");
        if (link.queue_limit < 1)
            fail(Kind::validation, line, "link " + std::to_string(id) + ": queue_limit must be >= 1");
        if (!(link.loss >= 0.0 && link.loss <= 1.0))
            fail(Kind::validation, line, "link " + std::to_string(id) + ": loss outside [0,1]");
    }

    for (const auto& [name, chain] : c.chains) {
        const std::size_t n = chain.chain.size();
        for (const auto& [state, profile] : chain.profiles) {
            const std::size_t line = LineInfo::get(li.profile, std::make_pair(name, state));
            const std::string where = "profile " + name + "." + std::to_string(state);
            if (state == 0)
                fail(Kind::validation, line, where + ": state 0 is idle and takes no profile");
            if (state >= n)
                fail(Kind::validation, line,
                     where + ": state outside the chain's 1.." + std::to_string(n - 1));
            if (profile.memory < 0.0 || profile.demand < 0.0)
                fail(Kind::validation, line, where + ": negative resource requirement");
            if (profile.file_size < 1)
                fail(Kind::validation, line, where + ": file_size must be at least 1 byte");
            if (!c.find_terminal(profile.destination))
                fail(Kind::unknown_reference, line,
                     where + ": unknown destination terminal " +
                         std::to_string(profile.destination));
        }
    }

    int prev_id = std::numeric_limits<int>::min();
    for (const TerminalConfig& term : c.terminals) {
        const std::size_t line = LineInfo::get(li.terminal, term.id);
        const std::string where = "terminal " + std::to_string(term.id);
        if (term.id < 0)
            fail(Kind::validation, line, where + ": id must be >= 0");
        if (term.id <= prev_id)
            fail(Kind::validation, line, where + ": ids must be unique and ascending");
        prev_id = term.id;
        if (term.capacity_memory < 0.0 || term.capacity_demand < 0.0)
            fail(Kind::validation, line, where + ": negative capacity");

        auto chain_it = c.chains.find(term.chain);
        if (chain_it == c.chains.end())
            fail(Kind::unknown_reference, line, where + ": unknown chain '" + term.chain + "'");
        if (!c.links.count(term.link))
            fail(Kind::unknown_reference, line,
                 where + ": unknown link " + std::to_string(term.link));
        const ChainConfig& chain = chain_it->second;
        if (chain.kind != term.kind)
            fail(Kind::validation, line,
                 where + ": kind " + std::string(to_string(term.kind)) + " does not match chain '" +
                     term.chain + "' (" + to_string(chain.kind) + ")");
        for (std::size_t s = 1; s < chain.chain.size(); ++s) {
            auto p = chain.profiles.find(s);
            if (p == chain.profiles.end())
                fail(Kind::validation, LineInfo::get(li.chain, term.chain),
                     "chain '" + term.chain + "': missing profile for state " + std::to_string(s));
            if (p->second.destination == term.id)
                fail(Kind::validation, line,
                     where + ": is its own destination in profile " + term.chain + "." +
                         std::to_string(s));
        }
    }
}

} // namespace

const char* to_string(TerminalKind kind) {
    return kind == TerminalKind::wired ? "wired" : "wireless";
}

const TerminalConfig* ScenarioConfig::find_terminal(int id) const {
    for (const TerminalConfig& t : terminals)
        if (t.id == id)
            return &t;
    return nullptr;
}

bool ScenarioConfig::operator==(const ScenarioConfig& o) const {
    return duration == o.duration && warmup == o.warmup && state_epoch == o.state_epoch &&
           metrics_window == o.metrics_window && transport == o.transport && links == o.links &&
           chains == o.chains && terminals == o.terminals;
}

ScenarioConfig parse_scenario(std::istream& in) {
    using Kind = ScenarioError::Kind;

    enum class Section { none, sim, transport, link, chain, profile, terminal };

    struct PendingChain {
        std::size_t header_line = 0;
        std::size_t states_line = 0;
        TerminalKind kind = TerminalKind::wired;
        std::vector<std::string> labels;
        std::vector<std::vector<double>> rows;
        std::vector<std::size_t> row_lines;
    };

    ScenarioConfig cfg;
    LineInfo li;
    std::map<std::string, PendingChain> chains;
    std::map<std::pair<std::string, std::size_t>, ServiceProfile> profiles;
    std::map<int, TerminalConfig> terminals;

    Section section = Section::none;
    int section_id = 0;          // link/terminal sections
    std::string section_name;    // chain sections
    std::pair<std::string, std::size_t> section_profile;
    bool saw_header = false;
    std::size_t lineno = 0;

    std::string raw;
    while (std::getline(in, raw)) {
        ++lineno;
        if (const auto hash = raw.find('#'); hash != std::string::npos)
            raw.erase(hash);
        const std::string line = trim(raw);
        if (line.empty())
            continue;

        if (!saw_header) {
            if (line != "hetsim-scenario v1")
                fail(Kind::syntax, lineno, "file must start with 'hetsim-scenario v1'");
            saw_header = true;
            continue;
        }

        if (line.front() == '[') {
            if (line.back() != ']')
                fail(Kind::syntax, lineno, "unterminated section header");
            const std::string inner = trim(line.substr(1, line.size() - 2));
            std::istringstream words(inner);
            std::string word, arg, extra;
            words >> word >> arg >> extra;
            if (!extra.empty())
                fail(Kind::syntax, lineno, "trailing text in section header");
            try {
                if (word == "sim" && arg.empty()) {
                    section = Section::sim;
                    li.sim = lineno;
                } else if (word == "transport" && arg.empty()) {
                    section = Section::transport;
                    li.transport = lineno;
                } else if (word == "link" && !arg.empty()) {
                    section = Section::link;
                    section_id = to_integer<int>(arg);
                    auto [slot, inserted] = cfg.links.try_emplace(section_id);
                    if (!inserted)
                        fail(Kind::syntax, lineno, "duplicate [link " + arg + "]");
                    slot->second.id = section_id;
                    li.link[section_id] = lineno;
                } else if (word == "chain" && !arg.empty()) {
                    section = Section::chain;
                    section_name = arg;
                    auto [slot, inserted] = chains.try_emplace(arg);
                    if (!inserted)
                        fail(Kind::syntax, lineno, "duplicate [chain " + arg + "]");
                    slot->second.header_line = lineno;
                    li.chain[arg] = lineno;
                } else if (word == "profile" && !arg.empty()) {
                    const auto dot = arg.rfind('.');
                    if (dot == std::string::npos || dot + 1 == arg.size() || dot == 0)
                        fail(Kind::syntax, lineno, "profile header must be [profile <chain>.<state>]");
                    section = Section::profile;
                    section_profile = {arg.substr(0, dot),
                                       to_integer<std::size_t>(arg.substr(dot + 1))};
                    if (!profiles.emplace(section_profile, ServiceProfile{}).second)
                        fail(Kind::syntax, lineno, "duplicate [profile " + arg + "]");
                    li.profile[section_profile] = lineno;
                } else if (word == "terminal" && !arg.empty()) {
                    section = Section::terminal;
                    section_id = to_integer<int>(arg);
                    auto [slot, inserted] = terminals.try_emplace(section_id);
                    if (!inserted)
                        fail(Kind::syntax, lineno, "duplicate [terminal " + arg + "]");
                    slot->second.id = section_id;
                    li.terminal[section_id] = lineno;
                } else {
                    fail(Kind::syntax, lineno, "unknown section [" + inner + "]");
                }
            } catch (const BadValue& bad) {
                fail(Kind::syntax, lineno, bad.what);
            }
            continue;
        }

        if (section == Section::chain && line.rfind("states:", 0) == 0) {
            PendingChain& pc = chains.at(section_name);
            pc.labels = split_commas(line.substr(7));
            pc.states_line = lineno;
            continue;
        }

        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            if (section == Section::chain) {
                PendingChain& pc = chains.at(section_name);
                std::vector<double> row;
                for (const std::string& cell : split_commas(line)) {
                    try {
                        row.push_back(to_double(cell));
                    } catch (const BadValue& bad) {
                        fail(Kind::syntax, lineno, "matrix row: " + bad.what);
                    }
                }
                pc.rows.push_back(std::move(row));
                pc.row_lines.push_back(lineno);
                continue;
            }
            fail(Kind::syntax, lineno, "expected 'key = value'");
        }

        const std::string key = trim(std::string_view(line).substr(0, eq));
        const std::string value = trim(std::string_view(line).substr(eq + 1));
        if (key.empty())
            fail(Kind::syntax, lineno, "empty key");

        bool known = false;
        try {
            switch (section) {
            case Section::none:
                fail(Kind::syntax, lineno, "key outside any section");
            case Section::sim:
                known = set_sim_key(cfg, key, value);
                break;
            case Section::transport:
                known = set_transport_key(cfg.transport, key, value);
                break;
            case Section::link:
                known = set_link_key(cfg.links.at(section_id), key, value);
                break;
            case Section::chain:
                if (key == "kind") {
                    chains.at(section_name).kind = to_kind(value);
                    known = true;
                }
                break;
            case Section::profile:
                known = set_profile_key(profiles.at(section_profile), key, value);
                break;
            case Section::terminal:
                known = set_terminal_key(terminals.at(section_id), key, value);
                break;
            }
        } catch (const BadValue& bad) {
            fail(Kind::syntax, lineno, key + ": " + bad.what);
        }
        if (!known)
            cfg.warnings.push_back("line " + std::to_string(lineno) + ": ignored key '" + key +
                                   "'");
    }

    for (auto& [name, pc] : chains) {
        try {
            markov::ServiceChain chain = markov::validate_chain(pc.labels, pc.rows);
            cfg.chains.emplace(name, ChainConfig{pc.kind, std::move(chain), {}});
        } catch (const markov::ChainError& err) {
            std::size_t line = pc.states_line ? pc.states_line : pc.header_line;
            if ((err.code == markov::ChainError::Code::row_sum ||
                 err.code == markov::ChainError::Code::entry_range ||
                 err.code == markov::ChainError::Code::not_square) &&
                err.row < pc.row_lines.size())
                line = pc.row_lines[err.row];
            fail(Kind::validation, line, "chain '" + name + "': " + err.what());
        }
    }

    for (auto& [key, profile] : profiles) {
        auto it = cfg.chains.find(key.first);
        if (it == cfg.chains.end())
            fail(Kind::unknown_reference, LineInfo::get(li.profile, key),
                 "profile references unknown chain '" + key.first + "'");
        it->second.profiles.emplace(key.second, std::move(profile));
    }

    cfg.terminals.reserve(terminals.size());
    for (auto& [id, term] : terminals)
        cfg.terminals.push_back(std::move(term));

    run_validation(cfg, li);
    return cfg;
}

ScenarioConfig parse_scenario(const std::string& text) {
    std::istringstream in(text);
    return parse_scenario(in);
}

ScenarioConfig parse_scenario_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ScenarioError(ScenarioError::Kind::validation, 0,
                            "cannot open scenario file '" + path + "'");
    return parse_scenario(in);
}

void validate_config(const ScenarioConfig& config) {
    run_validation(config, LineInfo{});
}

void serialize_scenario(const ScenarioConfig& config, std::ostream& out) {
    out << "hetsim-scenario v1\n";

    out << "\n[sim]\n";
    out << "duration = " << fmt(config.duration) << "\n";
    out << "warmup = " << fmt(config.warmup) << "\n";
    out << "state_epoch = " << fmt(config.state_epoch) << "\n";
    out << "metrics_window = " << fmt(config.metrics_window) << "\n";

    const TransportConfig& t = config.transport;
    out << "\n[transport]\n";
    out << "packet_size = " << t.packet_size << "\n";
    out << "header_overhead = " << t.header_overhead << "\n";
    out << "rto_initial = " << fmt(t.rto_initial) << "\n";
    out << "rto_min = " << fmt(t.rto_min) << "\n";
    out << "rto_max = " << fmt(t.rto_max) << "\n";
    out << "max_retransmits = " << t.max_retransmits << "\n";
    out << "initial_window = " << t.initial_window << "\n";

    for (const auto& [id, link] : config.links) {
        out << "\n[link " << id << "]\n";
        out << "bandwidth = " << fmt(link.bandwidth_bps) << "\n";
        out << "delay = " << fmt(link.delay_s) << "\n";
        out << "queue_limit = " << link.queue_limit << "\n";
        out << "loss = " << fmt(link.loss) << "\n";
    }

    for (const auto& [name, chain] : config.chains) {
        out << "\n[chain " << name << "]\n";
        out << "kind = " << to_string(chain.kind) << "\n";
        markov::write_chain_text(chain.chain, out);
    }

    for (const auto& [name, chain] : config.chains) {
        for (const auto& [state, p] : chain.profiles) {
            out << "\n[profile " << name << "." << state << "]\n";
            out << "service = " << p.service << "\n";
            out << "priority = " << p.priority << "\n";
            out << "memory = " << fmt(p.memory) << "\n";
            out << "demand = " << fmt(p.demand) << "\n";
            out << "file_size = " << p.file_size << "\n";
            out << "destination = " << p.destination << "\n";
        }
    }

    for (const TerminalConfig& term : config.terminals) {
        out << "\n[terminal " << term.id << "]\n";
        out << "kind = " << to_string(term.kind) << "\n";
        out << "chain = " << term.chain << "\n";
        out << "link = " << term.link << "\n";
        out << "capacity_memory = " << fmt(term.capacity_memory) << "\n";
        out << "capacity_demand = " << fmt(term.capacity_demand) << "\n";
        out << "auto_terminate = " << (term.auto_terminate ? "true" : "false") << "\n";
        out << "multitasking = " << (term.multitasking ? "true" : "false") << "\n";
    }
}

std::string serialize_scenario(const ScenarioConfig& config) {
    std::ostringstream out;
    serialize_scenario(config, out);
    return out.str();
}

void apply_override(ScenarioConfig& config, const std::string& key, const std::string& value) {
    using Kind = ScenarioError::Kind;

    std::vector<std::string> parts;
    std::size_t start = 0;
    while (true) {
        const auto dot = key.find('.', start);
        if (dot == std::string::npos) {
            parts.push_back(key.substr(start));
            break;
        }
        parts.push_back(key.substr(start, dot - start));
        start = dot + 1;
    }

    try {
        if (parts.size() == 2 && parts[0] == "sim") {
            if (set_sim_key(config, parts[1], value))
                return;
        } else if (parts.size() == 2 && parts[0] == "transport") {
            if (set_transport_key(config.transport, parts[1], value))
                return;
        } else if (parts.size() == 3 && parts[0] == "link") {
            auto it = config.links.find(to_integer<int>(parts[1]));
            if (it == config.links.end())
                fail(Kind::unknown_reference, 0, "override '" + key + "': no such link");
            if (set_link_key(it->second, parts[2], value))
                return;
        } else if (parts.size() == 3 && parts[0] == "terminal") {
            TerminalConfig* term = nullptr;
            const int id = to_integer<int>(parts[1]);
            for (TerminalConfig& t : config.terminals)
                if (t.id == id)
                    term = &t;
            if (!term)
                fail(Kind::unknown_reference, 0, "override '" + key + "': no such terminal");
            if (set_terminal_key(*term, parts[2], value))
                return;
        } else if (parts.size() == 4 && parts[0] == "profile") {
            auto it = config.chains.find(parts[1]);
            if (it == config.chains.end())
                fail(Kind::unknown_reference, 0, "override '" + key + "': no such chain");
            auto p = it->second.profiles.find(to_integer<std::size_t>(parts[2]));
            if (p == it->second.profiles.end())
                fail(Kind::unknown_reference, 0, "override '" + key + "': no such profile");
            if (set_profile_key(p->second, parts[3], value))
                return;
        } else {
            fail(Kind::unknown_reference, 0, "override '" + key + "': unknown section");
        }
    } catch (const BadValue& bad) {
        fail(Kind::syntax, 0, "override '" + key + "': " + bad.what);
    }
    fail(Kind::unknown_reference, 0, "override '" + key + "': unknown key");
}

namespace {

// Sticky random walk over the service states: each state keeps `self_loop`
// probability and spreads the rest over the other states, with the idle
// state carrying half the weight of an active one; users switch directly
// between services far more often than they stop everything.
markov::ServiceChain sticky_chain(std::vector<std::string> labels, double self_loop) {
    const std::size_t n = labels.size();
    std::vector<std::vector<double>> rows(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        double wsum = 0.0;
        std::vector<double> w(n, 0.0);
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i)
                continue;
            w[j] = j == 0 ? 0.5 : 1.0;
            wsum += w[j];
        }
        for (std::size_t j = 0; j < n; ++j)
            rows[i][j] = j == i ? self_loop : (1.0 - self_loop) * w[j] / wsum;
    }
    // Make rows sum to 1 exactly so validation stays comfortably inside its
    // tolerance for any state count.
    for (auto& row : rows) {
        double sum = 0.0;
        for (std::size_t c = 0; c + 1 < n; ++c)
            sum += row[c];
        row[n - 1] = 1.0 - sum;
    }
    return markov::validate_chain(std::move(labels), rows);
}

ScenarioConfig campus_scenario() {
    ScenarioConfig cfg;

    const std::vector<std::string> wired_labels = {
        "idle",         "personal_email", "office_mail", "watch_tv",
        "watch_movies", "listen_music",   "video_games", "browsing"};
    const std::vector<std::string> wireless_labels = {
        "idle", "personal_email", "office_mail", "listen_music", "video_games"};

    // service, priority, memory, demand, file size (bytes); destination is
    // filled per chain below. Media services stream content far larger than
    // one sitting delivers, so their transfers persist until the user stops;
    // interactive services exchange short bursts that finish well inside a
    // state epoch and leave the channel quiet in between.
    struct Row {
        const char* service;
        int priority;
        double memory;
        double demand;
        std::uint64_t size;
    };
    const std::vector<Row> wired_rows = {
        {"personal_email", 1, 10, 5, 49152},    {"office_mail", 2, 10, 5, 49152},
        {"watch_tv", 5, 30, 20, 16777216},      {"watch_movies", 5, 40, 25, 33554432},
        {"listen_music", 3, 15, 10, 6291456},   {"video_games", 4, 25, 15, 131072},
        {"browsing", 3, 10, 8, 98304}};
    const std::vector<Row> wireless_rows = {
        {"personal_email", 1, 10, 5, 32768},    {"office_mail", 2, 10, 5, 32768},
        {"listen_music", 3, 15, 10, 6291456},   {"video_games", 4, 25, 15, 98304}};

    auto add_chain = [&cfg](const std::string& name, TerminalKind kind,
                            const std::vector<std::string>& labels, const std::vector<Row>& rows,
                            int destination) {
        ChainConfig chain{kind, sticky_chain(labels, 0.6), {}};
        for (std::size_t s = 0; s < rows.size(); ++s) {
            const Row& r = rows[s];
            chain.profiles.emplace(
                s + 1, ServiceProfile{r.service, r.priority, r.memory, r.demand, r.size,
                                      destination});
        }
        cfg.chains.emplace(name, std::move(chain));
    };

    // Wired terminals upload to terminal 0 (the IT core); terminal 0 itself
    // archives to terminal 2, so it needs a chain of its own.
    add_chain("wired", TerminalKind::wired, wired_labels, wired_rows, 0);
    add_chain("wired_core", TerminalKind::wired, wired_labels, wired_rows, 2);
    add_chain("wireless", TerminalKind::wireless, wireless_labels, wireless_rows, 0);

    for (int id = 0; id <= 4; ++id)
        cfg.links.emplace(id, LinkConfig{id, 100e6, 0.003, 50, 0.0});
    cfg.links.emplace(5, LinkConfig{5, 54e6, 0.005, 50, 0.01});
    cfg.links.emplace(6, LinkConfig{6, 54e6, 0.005, 50, 0.01});

    // 0 core, 1 labs, 2 library, 3 offices, 4 dorm; 5/6 share access point
    // link 5, 7 sits alone on link 6.
    cfg.terminals.push_back({0, TerminalKind::wired, "wired_core", 0, 100, 50, true, true});
    for (int id = 1; id <= 4; ++id)
        cfg.terminals.push_back({id, TerminalKind::wired, "wired", id, 100, 50, true, true});
    cfg.terminals.push_back({5, TerminalKind::wireless, "wireless", 5, 50, 25, true, true});
    cfg.terminals.push_back({6, TerminalKind::wireless, "wireless", 5, 50, 25, true, true});
    cfg.terminals.push_back({7, TerminalKind::wireless, "wireless", 6, 50, 25, true, true});

    return cfg;
}

ScenarioConfig minimal_scenario() {
    ScenarioConfig cfg;

    cfg.links.emplace(0, LinkConfig{0, 54e6, 0.005, 50, 0.0});

    ChainConfig sender{TerminalKind::wired,
                       markov::validate_chain({"idle", "transfer"}, {{0.2, 0.8}, {0.2, 0.8}}),
                       {}};
    sender.profiles.emplace(1, ServiceProfile{"bulk", 1, 10, 5, 262144, 1});
    cfg.chains.emplace("sender", std::move(sender));

    // The sink never leaves idle; its profile exists only to satisfy the
    // completeness rule.
    ChainConfig sink{TerminalKind::wired,
                     markov::validate_chain({"idle", "transfer"}, {{1.0, 0.0}, {0.0, 1.0}}),
                     {}};
    sink.profiles.emplace(1, ServiceProfile{"bulk", 1, 10, 5, 262144, 0});
    cfg.chains.emplace("sink", std::move(sink));

    cfg.terminals.push_back({0, TerminalKind::wired, "sender", 0, 100, 50, true, true});
    cfg.terminals.push_back({1, TerminalKind::wired, "sink", 0, 100, 50, true, true});

    return cfg;
}

} // namespace

ScenarioConfig reference_scenario(ReferenceKind kind) {
    ScenarioConfig cfg =
        kind == ReferenceKind::campus ? campus_scenario() : minimal_scenario();
    validate_config(cfg);
    return cfg;
}

} // namespace hetsim::scenario
