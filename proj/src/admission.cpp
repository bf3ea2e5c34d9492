#include "hetsim/admission.hpp"

#include <algorithm>

namespace hetsim::admission {

bool eviction_before(const Task& a, const Task& b) {
    if (a.priority != b.priority)
        return a.priority < b.priority;
    if (a.memory != b.memory)
        return a.memory > b.memory;
    if (a.demand != b.demand)
        return a.demand > b.demand;
    return a.id < b.id;
}

int find_eviction_victim(std::span<const Task> tasks) {
    if (tasks.empty())
        throw AdmissionError(AdmissionError::Code::empty_set, "no tasks to pick a victim from");
    const Task* best = &tasks.front();
    for (const Task& t : tasks.subspan(1)) {
        if (eviction_before(t, *best))
            best = &t;
    }
    return best->id;
}

Controller::Controller(double capacity_mem, double capacity_demand, bool auto_terminate)
    : capacity_mem_(capacity_mem), capacity_demand_(capacity_demand),
      auto_terminate_(auto_terminate) {}

bool Controller::has_task(int task_id) const {
    return std::any_of(ledger_.begin(), ledger_.end(),
                       [&](const Task& t) { return t.id == task_id; });
}

double Controller::used_mem() const {
    double s = 0.0;
    for (const Task& t : ledger_)
        s += t.memory;
    return s;
}

double Controller::used_demand() const {
    double s = 0.0;
    for (const Task& t : ledger_)
        s += t.demand;
    return s;
}

std::pair<double, double> Controller::free_capacity() const {
    return {std::max(0.0, capacity_mem_ - used_mem()),
            std::max(0.0, capacity_demand_ - used_demand())};
}

Decision Controller::request_service(const Task& task) {
    if (task.memory < 0.0 || task.demand < 0.0) {
        throw AdmissionError(AdmissionError::Code::invalid_task,
                             "task " + std::to_string(task.id) + " has negative resources");
    }
    if (has_task(task.id)) {
        throw AdmissionError(AdmissionError::Code::duplicate_task,
                             "task id " + std::to_string(task.id) + " already admitted");
    }
    if (task.memory > capacity_mem_ || task.demand > capacity_demand_)
        return Decision{false, {}, RejectReason::exceeds_total_capacity};

    auto [free_mem, free_demand] = free_capacity();
    if (task.memory <= free_mem && task.demand <= free_demand) {
        ledger_.push_back(task);
        return Decision{true, {}, {}};
    }
    if (!auto_terminate_)
        return Decision{false, {}, RejectReason::eviction_declined};

    // Never evict strictly higher priority; equal priority is evictable.
    std::vector<Task> candidates;
    double cand_mem = 0.0, cand_demand = 0.0;
    for (const Task& t : ledger_) {
        if (t.priority <= task.priority) {
            candidates.push_back(t);
            cand_mem += t.memory;
            cand_demand += t.demand;
        }
    }
    // All-or-nothing feasibility before any side effect.
    if (task.memory > free_mem + cand_mem || task.demand > free_demand + cand_demand)
        return Decision{false, {}, RejectReason::insufficient_capacity};

    std::sort(candidates.begin(), candidates.end(), eviction_before);
    Decision d{true, {}, {}};
    for (const Task& victim : candidates) {
        if (task.memory <= free_mem && task.demand <= free_demand)
            break;
        auto [mem, dem] = terminate(victim.id);
        free_mem += mem;
        free_demand += dem;
        d.evicted.push_back(victim.id);
    }
    ledger_.push_back(task);
    return d;
}

std::pair<double, double> Controller::terminate(int task_id) {
    auto it = std::find_if(ledger_.begin(), ledger_.end(),
                           [&](const Task& t) { return t.id == task_id; });
    if (it == ledger_.end()) {
        throw AdmissionError(AdmissionError::Code::unknown_task,
                             "unknown task id " + std::to_string(task_id));
    }
    std::pair<double, double> freed{it->memory, it->demand};
    ledger_.erase(it);
    return freed;
}

} // namespace hetsim::admission
