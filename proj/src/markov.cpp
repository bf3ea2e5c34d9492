#include "hetsim/markov.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>

namespace hetsim::markov {

bool operator==(const ServiceChain& a, const ServiceChain& b) {
    return a.states_ == b.states_ && a.matrix_ == b.matrix_;
}

ServiceChain validate_chain(std::vector<std::string> states,
                            const std::vector<std::vector<double>>& matrix) {
    const std::size_t n = matrix.size();
    if (n != states.size()) {
        throw ChainError(ChainError::Code::not_square,
                         "state label count (" + std::to_string(states.size()) +
                             ") does not match matrix dimension (" + std::to_string(n) + ")");
    }
    if (n < 2)
        throw ChainError(ChainError::Code::too_few_states, "chain needs at least 2 states");
    if (n > kMaxStates)
        throw ChainError(ChainError::Code::chain_too_large,
                         "chain has " + std::to_string(n) + " states, limit is 64");

    std::vector<double> flat;
    flat.reserve(n * n);
    for (std::size_t r = 0; r < n; ++r) {
        if (matrix[r].size() != n) {
            throw ChainError(ChainError::Code::not_square,
                             "row " + std::to_string(r) + " has " +
                                 std::to_string(matrix[r].size()) + " entries, expected " +
                                 std::to_string(n),
                             r);
        }
        double sum = 0.0;
        for (std::size_t c = 0; c < n; ++c) {
            const double p = matrix[r][c];
            if (!(p >= 0.0 && p <= 1.0)) {
                throw ChainError(ChainError::Code::entry_range,
                                 "entry (" + std::to_string(r) + "," + std::to_string(c) +
                                     ") = " + std::to_string(p) + " outside [0,1]",
                                 r, c, p);
            }
            sum += p;
        }
        if (std::abs(sum - 1.0) > kRowSumTolerance) {
            throw ChainError(ChainError::Code::row_sum,
                             "row " + std::to_string(r) + " sums to " + std::to_string(sum),
                             r, 0, sum);
        }
        flat.insert(flat.end(), matrix[r].begin(), matrix[r].end());
    }
    return ServiceChain(std::move(states), std::move(flat));
}

namespace {

// One pass of pi <- pi * M with renormalization; returns max-norm change.
double iterate_once(const std::vector<double>& m, std::size_t n, std::vector<double>& pi,
                    std::vector<double>& next) {
    std::fill(next.begin(), next.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double w = pi[i];
        if (w == 0.0)
            continue;
        const double* row = &m[i * n];
        for (std::size_t j = 0; j < n; ++j)
            next[j] += w * row[j];
    }
    double sum = 0.0;
    for (double v : next)
        sum += v;
    for (double& v : next)
        v /= sum;
    double diff = 0.0;
    for (std::size_t j = 0; j < n; ++j)
        diff = std::max(diff, std::abs(next[j] - pi[j]));
    pi.swap(next);
    return diff;
}

std::optional<std::vector<double>> power_iterate(const std::vector<double>& m, std::size_t n,
                                                 std::vector<double> start) {
    std::vector<double> scratch(n);
    for (std::size_t it = 0; it < kPowerIterCap; ++it) {
        if (iterate_once(m, n, start, scratch) < kPowerIterTolerance)
            return start;
    }
    return std::nullopt;
}

} // namespace

StationaryDistribution steady_state(const ServiceChain& chain) {
    const std::size_t n = chain.size();
    const auto& m = chain.flat_matrix();

    std::vector<double> uniform(n, 1.0 / static_cast<double>(n));
    std::vector<double> basis(n, 0.0);
    basis[0] = 1.0;

    auto a = power_iterate(m, n, std::move(uniform));
    auto b = power_iterate(m, n, std::move(basis));
    if (!a || !b) {
        throw ChainError(ChainError::Code::non_unique_stationary,
                         "power iteration did not converge; chain is not aperiodic-irreducible");
    }
    double diff = 0.0;
    for (std::size_t j = 0; j < n; ++j)
        diff = std::max(diff, std::abs((*a)[j] - (*b)[j]));
    if (diff > 1e-6) {
        throw ChainError(ChainError::Code::non_unique_stationary,
                         "stationary distribution is not unique (start-vector disagreement " +
                             std::to_string(diff) + ")");
    }
    return StationaryDistribution{std::move(*a)};
}

std::size_t step(const ServiceChain& chain, std::size_t current, RandomStream& rng) {
    const std::size_t n = chain.size();
    if (current >= n) {
        throw ChainError(ChainError::Code::state_out_of_range,
                         "state " + std::to_string(current) + " outside [0," + std::to_string(n) +
                             ")",
                         current);
    }
    const double u = rng.next_unit(); // exactly one draw per step
    double acc = 0.0;
    for (std::size_t j = 0; j + 1 < n; ++j) {
        acc += chain.prob(current, j);
        if (u < acc)
            return j;
    }
    return n - 1;
}

std::vector<std::size_t> simulate_trajectory(const ServiceChain& chain, std::size_t start,
                                             std::size_t steps, RandomStream& rng) {
    if (start >= chain.size()) {
        throw ChainError(ChainError::Code::state_out_of_range,
                         "start state " + std::to_string(start) + " outside [0," +
                             std::to_string(chain.size()) + ")",
                         start);
    }
    std::vector<std::size_t> path;
    path.reserve(steps);
    std::size_t cur = start;
    for (std::size_t k = 0; k < steps; ++k) {
        cur = step(chain, cur, rng);
        path.push_back(cur);
    }
    return path;
}

ServiceChain parse_chain_text(std::istream& in) {
    std::string line;
    // skip blank lines before the header
    while (std::getline(in, line)) {
        auto first = line.find_first_not_of(" \t\r");
        if (first != std::string::npos) {
            line = line.substr(first);
            break;
        }
    }
    constexpr const char* kHeader = "states:";
    if (line.rfind(kHeader, 0) != 0) {
        throw ChainError(ChainError::Code::not_square,
                         "chain text must start with a 'states:' line");
    }

    auto split = [](const std::string& s) {
        std::vector<std::string> parts;
        std::string cur;
        for (char ch : s) {
            if (ch == ',') {
                parts.push_back(cur);
                cur.clear();
            } else {
                cur += ch;
            }
        }
        parts.push_back(cur);
        for (auto& p : parts) {
            auto b = p.find_first_not_of(" \t\r");
            auto e = p.find_last_not_of(" \t\r");
            p = (b == std::string::npos) ? std::string() : p.substr(b, e - b + 1);
        }
        return parts;
    };

    std::vector<std::string> labels = split(line.substr(std::string(kHeader).size()));
    const std::size_t n = labels.size();

    std::vector<std::vector<double>> rows;
    while (rows.size() < n && std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos)
            continue;
        std::vector<double> row;
        for (const auto& cell : split(line)) {
            double v = 0.0;
            auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
            if (ec != std::errc() || ptr != cell.data() + cell.size()) {
                throw ChainError(ChainError::Code::entry_range,
                                 "unparseable matrix entry '" + cell + "'", rows.size());
            }
            row.push_back(v);
        }
        rows.push_back(std::move(row));
    }
    return validate_chain(std::move(labels), rows);
}

void write_chain_text(const ServiceChain& chain, std::ostream& out) {
    out << "states: ";
    for (std::size_t i = 0; i < chain.size(); ++i) {
        if (i)
            out << ",";
        out << chain.states()[i];
    }
    out << "\n";
    char buf[64];
    for (std::size_t r = 0; r < chain.size(); ++r) {
        for (std::size_t c = 0; c < chain.size(); ++c) {
            if (c)
                out << ",";
            auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, chain.prob(r, c));
            out.write(buf, ptr - buf);
        }
        out << "\n";
    }
}

} // namespace hetsim::markov
