#pragma once

#include <array>
#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <queue>
#include <stdexcept>
#include <string>
#include <vector>

#include "hetsim/metrics.hpp"
#include "hetsim/rng.hpp"
#include "hetsim/scenario.hpp"

namespace hetsim::netsim {

// Pending-event cap; exceeding it aborts the run.
inline constexpr std::size_t kDefaultEventCap = 10'000'000;

class SimulationDiverged : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class UnknownPacket : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Event {
    double time = 0.0;
    std::uint64_t seq = 0; // insertion order, breaks time ties
    int kind = 0;
    int a = 0; // kind-specific payload
    int b = 0;
    std::uint64_t c = 0;
};

// Time-ordered queue; equal times dispatch in insertion order so runs replay
// identically.
class EventQueue {
public:
    void push(double time, int kind, int a = 0, int b = 0, std::uint64_t c = 0);
    Event pop();
    bool empty() const { return heap_.empty(); }
    std::size_t size() const { return heap_.size(); }

private:
    struct After {
        bool operator()(const Event& x, const Event& y) const {
            if (x.time != y.time)
                return x.time > y.time;
            return x.seq > y.seq;
        }
    };

    std::priority_queue<Event, std::vector<Event>, After> heap_;
    std::uint64_t next_seq_ = 0;
};

// Self-contained so a packet outlives its transfer (a cancelled transfer's
// packets still occupy the wire).
struct Packet {
    int transfer = 0;
    int seq = 0;
    std::uint32_t payload_bytes = 0;
    int dst_link = 0;
};

// FIFO with a hard occupancy limit counting the in-service packet: the front
// element stays queued while it serializes and is popped only when its
// transmission completes.
class DropTailQueue {
public:
    explicit DropTailQueue(std::uint32_t limit) : limit_(limit) {}

    // False (a drop) when the queue already holds `limit` packets.
    bool try_push(Packet p);

    const Packet& front() const { return q_.front(); }
    void pop() { q_.pop_front(); }
    bool empty() const { return q_.empty(); }
    std::size_t size() const { return q_.size(); }
    std::uint32_t limit() const { return limit_; }

private:
    std::uint32_t limit_;
    std::deque<Packet> q_;
};

// Retransmission timeouts: double per timeout, clamped into [min, max].
struct RtoPolicy {
    double initial = 4.0;
    double min = 1.0;
    double max = 60.0;

    double first() const;
    double next(double current) const;
};

// Sender-side record of one file transfer. The engine drives it; tests can
// drive it directly.
class FileTransfer {
public:
    FileTransfer(int id, int src, int dst, std::uint64_t size_bytes, std::uint64_t packet_size,
                 double start_time);

    int id() const { return id_; }
    int src() const { return src_; }
    int dst() const { return dst_; }
    std::uint64_t size_bytes() const { return size_; }
    int total_packets() const { return total_; }

    // Payload bytes carried by one sequence number (the tail packet may be
    // short).
    std::uint64_t payload_bytes(int seq) const;

    void record_send(int seq);
    bool seq_acked(int seq) const { return acked_[static_cast<std::size_t>(seq)]; }

    // Marks `seq` acknowledged; completes the transfer (end_time = now) once
    // every sequence is acked. Unsent or already-acked sequences throw
    // UnknownPacket.
    void ack_packet(int seq, double now);

    bool complete() const { return complete_; }
    double start_time() const { return start_; }
    double end_time() const { return end_; } // valid once complete

    std::uint64_t packets_sent() const { return packets_sent_; }
    std::uint64_t packets_acked() const { return packets_acked_; }

private:
    int id_;
    int src_;
    int dst_;
    std::uint64_t size_;
    std::uint64_t packet_size_;
    int total_;
    double start_;
    double end_ = 0.0;
    bool complete_ = false;
    std::uint64_t packets_sent_ = 0;
    std::uint64_t packets_acked_ = 0;
    std::vector<bool> sent_;
    std::vector<bool> acked_;
};

// Workload actions for one chain step. Stops are applied before the start.
struct WorkloadActions {
    std::vector<std::size_t> stop_states;
    std::optional<std::size_t> start_state;
};

// Maps an epoch's new chain state to task actions. State 0 stops every live
// task. An active state starts its task unless already live; without
// multitasking all other live tasks stop first.
WorkloadActions service_state_actions(bool multitasking, std::size_t new_state,
                                      std::size_t n_states,
                                      const std::vector<std::size_t>& live_states);

struct TransferStat {
    int id = 0;
    int src = 0;
    int dst = 0;
    std::uint64_t size_bytes = 0;
    double start_s = 0.0;
    double end_s = 0.0; // valid when completed
    std::uint64_t packets_sent = 0;
    std::uint64_t packets_acked = 0;
    bool completed = false;
    bool failed = false;
    bool cancelled = false; // none of the three: still open at run end
};

struct LinkStats {
    std::uint64_t packets_enqueued = 0;
    std::uint64_t queue_drops = 0;
    std::uint64_t loss_drops = 0;
    std::uint64_t packets_delivered = 0;
    std::uint64_t wire_bits = 0; // payload + header, retransmissions included
};

struct SimulationReport {
    metrics::MetricsSeries series;
    std::vector<TransferStat> transfers;
    std::map<int, LinkStats> link_stats;        // link id ->
    std::map<int, std::size_t> peak_ledger;     // terminal id -> max tasks held
    std::uint64_t delivered_payload_bits = 0;   // first deliveries only
    std::uint64_t packets_sent = 0;
    std::uint64_t packets_acked = 0;
    std::uint64_t completed = 0;
    std::uint64_t failed = 0;
    std::uint64_t cancelled = 0;
    std::uint64_t events_dispatched = 0;
};

// Validates the config, then runs the event loop from t=0 to duration.
// Identical (config, seed) pairs produce identical reports.
SimulationReport run_scenario(const scenario::ScenarioConfig& config, std::uint64_t seed,
                              std::size_t event_cap = kDefaultEventCap);

// Network-wide utilization per window: all links' wire bits against their
// combined nominal capacity, as a percentage.
std::vector<double> network_util_series(const SimulationReport& report,
                                        const scenario::ScenarioConfig& config);

} // namespace hetsim::netsim
