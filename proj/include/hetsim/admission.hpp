#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace hetsim::admission {

class AdmissionError : public std::runtime_error {
public:
    enum class Code { duplicate_task, invalid_task, unknown_task, empty_set };

    AdmissionError(Code code, std::string msg) : std::runtime_error(std::move(msg)), code(code) {}

    Code code;
};

// One active service instance. Lower priority value = lower priority.
struct Task {
    int id = 0;
    std::string service;
    int priority = 0;
    double memory = 0.0;
    double demand = 0.0;
};

// Total eviction order: priority ascending, memory descending, demand
// descending, id ascending. The first task under this order is evicted first.
bool eviction_before(const Task& a, const Task& b);

// Id of the first task under the eviction order; throws empty_set.
int find_eviction_victim(std::span<const Task> tasks);

enum class RejectReason {
    exceeds_total_capacity,   // task can never fit, even in an empty pool
    eviction_declined,        // needs evictions but auto_terminate is false
    insufficient_capacity,    // evicting every candidate still would not fit
};

struct Decision {
    bool admitted = false;
    std::vector<int> evicted;                              // ids, in eviction order
    RejectReason reason = RejectReason::exceeds_total_capacity; // valid when !admitted
};

// Per-terminal resource pool with the multitasking admission/eviction policy.
// A request that fits free capacity is admitted outright. Otherwise incumbents
// with priority <= the newcomer's are evicted one at a time in eviction order
// until it fits; feasibility is checked before any removal, so a doomed
// request leaves the ledger untouched. With auto_terminate false the request
// is rejected instead of evicting.
class Controller {
public:
    Controller(double capacity_mem, double capacity_demand, bool auto_terminate = true);

    Decision request_service(const Task& task);

    // Removes the task and returns the freed (memory, demand).
    std::pair<double, double> terminate(int task_id);

    std::pair<double, double> free_capacity() const;

    const std::vector<Task>& ledger() const { return ledger_; }
    bool has_task(int task_id) const;
    double capacity_mem() const { return capacity_mem_; }
    double capacity_demand() const { return capacity_demand_; }
    bool auto_terminate() const { return auto_terminate_; }

private:
    double used_mem() const;
    double used_demand() const;

    double capacity_mem_;
    double capacity_demand_;
    bool auto_terminate_;
    std::vector<Task> ledger_; // insertion order
};

} // namespace hetsim::admission
