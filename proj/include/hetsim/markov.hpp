#pragma once

#include <cstddef>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "hetsim/rng.hpp"

namespace hetsim::markov {

class ChainError : public std::runtime_error {
public:
    enum class Code {
        not_square,            // matrix not n x n, or label count mismatch
        too_few_states,        // n < 2
        chain_too_large,       // n > 64
        row_sum,               // |row sum - 1| > tolerance
        entry_range,           // entry outside [0, 1]
        state_out_of_range,    // state index outside [0, n)
        non_unique_stationary, // reducible or periodic chain
    };

    ChainError(Code code, std::string msg, std::size_t row = 0, std::size_t col = 0,
               double value = 0.0)
        : std::runtime_error(std::move(msg)), code(code), row(row), col(col), value(value) {}

    Code code;
    std::size_t row;
    std::size_t col;
    double value; // offending row sum or entry
};

// Validation and solver tolerances.
inline constexpr double kRowSumTolerance = 1e-9;
inline constexpr double kPowerIterTolerance = 1e-12;
inline constexpr std::size_t kPowerIterCap = 1'000'000;
inline constexpr std::size_t kMaxStates = 64;

// A finite service chain: labeled states (index 0 is idle) plus a validated
// row-stochastic transition matrix. Construct via validate_chain or
// parse_chain_text; instances always satisfy the invariants.
class ServiceChain {
public:
    std::size_t size() const { return states_.size(); }
    const std::vector<std::string>& states() const { return states_; }

    // Transition probability from state `from` to state `to`.
    double prob(std::size_t from, std::size_t to) const { return matrix_[from * size() + to]; }

    const std::vector<double>& flat_matrix() const { return matrix_; }

    friend ServiceChain validate_chain(std::vector<std::string> states,
                                       const std::vector<std::vector<double>>& matrix);
    friend bool operator==(const ServiceChain&, const ServiceChain&);

private:
    ServiceChain(std::vector<std::string> states, std::vector<double> flat)
        : states_(std::move(states)), matrix_(std::move(flat)) {}

    std::vector<std::string> states_;
    std::vector<double> matrix_; // row-major n*n
};

bool operator==(const ServiceChain& a, const ServiceChain& b);

struct StationaryDistribution {
    std::vector<double> probs; // nonnegative, sums to 1 within 1e-9
};

// Checks squareness, label count, entry range and row sums; throws ChainError
// on the first violation (row-major scan order).
ServiceChain validate_chain(std::vector<std::string> states,
                            const std::vector<std::vector<double>>& matrix);

// Solves pi = pi * M by dense power iteration (threshold 1e-12 in max norm,
// cap 1e6 iterations). Runs from two starting vectors; disagreement beyond
// 1e-6 or non-convergence raises non_unique_stationary.
StationaryDistribution steady_state(const ServiceChain& chain);

// Samples the successor of `current`, consuming exactly one draw from `rng`.
std::size_t step(const ServiceChain& chain, std::size_t current, RandomStream& rng);

// States visited after 1..steps transitions from `start`. Replays identically
// for an identical rng state.
std::vector<std::size_t> simulate_trajectory(const ServiceChain& chain, std::size_t start,
                                             std::size_t steps, RandomStream& rng);

// Text form used inside scenario files and by the steady CLI command:
//   states: <comma-separated labels>
//   <row 0 as comma-separated decimals>
//   ...
ServiceChain parse_chain_text(std::istream& in);
void write_chain_text(const ServiceChain& chain, std::ostream& out);

} // namespace hetsim::markov
