#include "hetsim/netsim.hpp"

#include <algorithm>
#include <cmath>

#include "hetsim/admission.hpp"
#include "hetsim/markov.hpp"

namespace hetsim::netsim {

void EventQueue::push(double time, int kind, int a, int b, std::uint64_t c) {
    heap_.push(Event{time, next_seq_++, kind, a, b, c});
}

Event EventQueue::pop() {
    Event e = heap_.top();
    heap_.pop();
    return e;
}

bool DropTailQueue::try_push(Packet p) {
    if (q_.size() >= limit_)
        return false;
    q_.push_back(p);
    return true;
}

double RtoPolicy::first() const {
    return std::clamp(initial, min, max);
}

double RtoPolicy::next(double current) const {
    return std::clamp(2.0 * current, min, max);
}

FileTransfer::FileTransfer(int id, int src, int dst, std::uint64_t size_bytes,
                           std::uint64_t packet_size, double start_time)
    : id_(id), src_(src), dst_(dst), size_(size_bytes), packet_size_(packet_size),
      total_(static_cast<int>((size_bytes + packet_size - 1) / packet_size)), start_(start_time),
      sent_(static_cast<std::size_t>(total_), false),
      acked_(static_cast<std::size_t>(total_), false) {}

std::uint64_t FileTransfer::payload_bytes(int seq) const {
    if (seq + 1 == total_)
        return size_ - static_cast<std::uint64_t>(total_ - 1) * packet_size_;
    return packet_size_;
}

void FileTransfer::record_send(int seq) {
    sent_[static_cast<std::size_t>(seq)] = true;
    ++packets_sent_;
}

void FileTransfer::ack_packet(int seq, double now) {
    if (seq < 0 || seq >= total_ || !sent_[static_cast<std::size_t>(seq)])
        throw UnknownPacket("ack for unsent packet " + std::to_string(seq) + " of transfer " +
                            std::to_string(id_));
    if (acked_[static_cast<std::size_t>(seq)])
        throw UnknownPacket("duplicate ack for packet " + std::to_string(seq) + " of transfer " +
                            std::to_string(id_));
    acked_[static_cast<std::size_t>(seq)] = true;
    ++packets_acked_;
    if (packets_acked_ == static_cast<std::uint64_t>(total_)) {
        complete_ = true;
        end_ = now;
    }
}

WorkloadActions service_state_actions(bool multitasking, std::size_t new_state,
                                      std::size_t n_states,
                                      const std::vector<std::size_t>& live_states) {
    if (new_state >= n_states)
        throw markov::ChainError(markov::ChainError::Code::state_out_of_range,
                                 "state " + std::to_string(new_state) + " outside [0," +
                                     std::to_string(n_states) + ")",
                                 new_state);
    WorkloadActions actions;
    bool already_live = false;
    for (std::size_t s : live_states) {
        if (s == new_state)
            already_live = true;
        else if (new_state == 0 || !multitasking)
            actions.stop_states.push_back(s);
    }
    if (new_state != 0 && !already_live)
        actions.start_state = new_state;
    return actions;
}

namespace {

enum EventKind : int {
    kChainEpoch = 0,
    kTxDone,    // a = link, b = direction (0 up, 1 down)
    kHubArrive, // a = transfer, b = seq, c = payload | dst_link << 32
    kDstArrive, // a = transfer, b = seq
    kAckArrive, // a = transfer, b = seq
    kRtoTimer,  // a = transfer, b = seq, c = timer token
};

constexpr int kMaxAttempts = 16; // initial send plus up to 15 retransmits

struct SeqState {
    std::array<std::uint32_t, kMaxAttempts> attempt_window{};
    std::uint8_t attempts = 0;
    bool acked = false;
    bool delivered = false; // first copy reached the destination
    std::uint32_t timer_token = 0;
    double rto = 0.0; // timeout armed for the latest send
};

struct TransferRuntime {
    FileTransfer ft;
    int task_id;
    int src_link;
    int dst_link;
    std::uint32_t window;
    int next_seq = 0;    // next never-sent sequence
    int outstanding = 0; // sent, unacked sequences
    std::vector<SeqState> seqs;

    TransferRuntime(FileTransfer f, int task, int src_l, int dst_l, std::uint32_t w)
        : ft(std::move(f)), task_id(task), src_link(src_l), dst_link(dst_l), window(w),
          seqs(static_cast<std::size_t>(ft.total_packets())) {}
};

struct LinkRuntime {
    const scenario::LinkConfig* cfg;
    DropTailQueue up;
    DropTailQueue down;
    RandomStream loss;
    LinkStats stats;
    std::vector<std::uint64_t> wire_bits_w;

    LinkRuntime(const scenario::LinkConfig* c, std::uint64_t seed, std::size_t windows)
        : cfg(c), up(c->queue_limit), down(c->queue_limit),
          loss(seed, RandomStream::kLinkSalt + static_cast<std::uint64_t>(c->id)),
          wire_bits_w(windows, 0) {}
};

struct TerminalRuntime {
    const scenario::TerminalConfig* cfg;
    const scenario::ChainConfig* chain;
    admission::Controller controller;
    RandomStream stream;
    std::size_t state = 0;
    std::map<std::size_t, int> state_task; // live chain state -> task id
    std::map<int, int> task_transfer;      // task id -> transfer id
    int next_task_id = 0;
    std::size_t peak_ledger = 0;
    std::vector<std::uint64_t> delivered_bits_w;
    std::vector<std::uint64_t> transmitted_w;
    std::vector<std::uint64_t> acked_w;

    TerminalRuntime(const scenario::TerminalConfig* c, const scenario::ChainConfig* ch,
                    std::uint64_t seed, std::size_t windows)
        : cfg(c), chain(ch), controller(c->capacity_memory, c->capacity_demand, c->auto_terminate),
          stream(seed, static_cast<std::uint64_t>(c->id)), delivered_bits_w(windows, 0),
          transmitted_w(windows, 0), acked_w(windows, 0) {}
};

class Engine {
public:
    Engine(const scenario::ScenarioConfig& config, std::uint64_t seed, std::size_t cap)
        : cfg_(config), seed_(seed), cap_(cap),
          rto_{config.transport.rto_initial, config.transport.rto_min, config.transport.rto_max} {
        const double span = cfg_.duration - cfg_.warmup;
        if (span > 0.0) {
            windows_ = static_cast<std::size_t>(std::ceil(span / cfg_.metrics_window - 1e-12));
            last_window_ =
                span - static_cast<double>(windows_ - 1) * cfg_.metrics_window;
        }
    }

    SimulationReport run();

private:
    std::size_t window_index(double t) const {
        const double off = (t - cfg_.warmup) / cfg_.metrics_window;
        if (off <= 0.0)
            return 0;
        const auto w = static_cast<std::size_t>(off);
        return std::min(w, windows_ - 1);
    }

    void push_event(double time, int kind, int a = 0, int b = 0, std::uint64_t c = 0) {
        q_.push(time, kind, a, b, c);
        if (q_.size() > cap_)
            throw SimulationDiverged("pending events exceed cap of " + std::to_string(cap_));
    }

    double tx_time(const LinkRuntime& l, const Packet& p) const {
        const double bits =
            8.0 * static_cast<double>(p.payload_bytes + cfg_.transport.header_overhead);
        return bits / l.cfg->bandwidth_bps;
    }

    void enqueue(LinkRuntime& l, bool up, const Packet& p) {
        DropTailQueue& ch = up ? l.up : l.down;
        ++l.stats.packets_enqueued;
        if (!ch.try_push(p)) {
            ++l.stats.queue_drops;
            return;
        }
        if (ch.size() == 1)
            push_event(now_ + tx_time(l, p), kTxDone, l.cfg->id, up ? 0 : 1);
    }

    void send_packet(TransferRuntime& rt, int seq, bool fresh) {
        SeqState& ss = rt.seqs[static_cast<std::size_t>(seq)];
        if (fresh) {
            ss.rto = rto_.first();
            ++rt.outstanding;
        }
        ss.attempt_window[ss.attempts] = static_cast<std::uint32_t>(window_index(now_));
        ++ss.attempts;
        rt.ft.record_send(seq);
        ++sent_total_;
        ++ss.timer_token;
        push_event(now_ + ss.rto, kRtoTimer, rt.ft.id(), seq, ss.timer_token);

        LinkRuntime& l = links_.at(rt.src_link);
        enqueue(l, true,
                Packet{rt.ft.id(), seq, static_cast<std::uint32_t>(rt.ft.payload_bytes(seq)),
                       rt.dst_link});
    }

    void fill_window(TransferRuntime& rt) {
        while (rt.outstanding < static_cast<int>(rt.window) &&
               rt.next_seq < rt.ft.total_packets())
            send_packet(rt, rt.next_seq++, true);
    }

    TransferStat make_stat(const TransferRuntime& rt) const {
        TransferStat s;
        s.id = rt.ft.id();
        s.src = rt.ft.src();
        s.dst = rt.ft.dst();
        s.size_bytes = rt.ft.size_bytes();
        s.start_s = rt.ft.start_time();
        s.end_s = rt.ft.complete() ? rt.ft.end_time() : 0.0;
        s.packets_sent = rt.ft.packets_sent();
        s.packets_acked = rt.ft.packets_acked();
        return s;
    }

    TerminalRuntime& term_of(int id) { return terms_[term_index_.at(id)]; }

    // Drops a task's transfer without metric resolution: in-flight attempts
    // of a cancelled transfer are excluded from goodput accounting.
    void cancel_transfer(int transfer_id) {
        auto it = transfers_.find(transfer_id);
        if (it == transfers_.end())
            return;
        TransferStat s = make_stat(it->second);
        s.cancelled = true;
        archive_.push_back(s);
        ++cancelled_;
        transfers_.erase(it);
    }

    void detach_task(TerminalRuntime& t, int task_id) {
        for (auto it = t.state_task.begin(); it != t.state_task.end(); ++it) {
            if (it->second == task_id) {
                t.state_task.erase(it);
                break;
            }
        }
        auto tt = t.task_transfer.find(task_id);
        if (tt != t.task_transfer.end()) {
            cancel_transfer(tt->second);
            t.task_transfer.erase(tt);
        }
    }

    void stop_task(TerminalRuntime& t, std::size_t state) {
        const int task_id = t.state_task.at(state);
        detach_task(t, task_id);
        t.controller.terminate(task_id);
    }

    // Bookkeeping shared by transfer completion and failure: the task ends
    // with its transfer.
    void release_task(TerminalRuntime& t, int task_id) {
        t.controller.terminate(task_id);
        t.task_transfer.erase(task_id);
        for (auto it = t.state_task.begin(); it != t.state_task.end(); ++it) {
            if (it->second == task_id) {
                t.state_task.erase(it);
                break;
            }
        }
    }

    void start_task(TerminalRuntime& t, std::size_t state) {
        const scenario::ServiceProfile& p = t.chain->profiles.at(state);
        admission::Task task{t.next_task_id++, p.service, p.priority, p.memory, p.demand};
        const admission::Decision d = t.controller.request_service(task);
        if (!d.admitted)
            return;
        for (int victim : d.evicted)
            detach_task(t, victim); // the controller already dropped it
        t.peak_ledger = std::max(t.peak_ledger, t.controller.ledger().size());

        const int id = next_transfer_id_++;
        const scenario::TerminalConfig* dst = cfg_.find_terminal(p.destination);
        auto [it, inserted] = transfers_.emplace(
            id, TransferRuntime(FileTransfer(id, t.cfg->id, p.destination, p.file_size,
                                             cfg_.transport.packet_size, now_),
                                task.id, t.cfg->link, dst->link,
                                cfg_.transport.initial_window));
        t.state_task[state] = task.id;
        t.task_transfer[task.id] = id;
        fill_window(it->second);
    }

    void step_terminal(TerminalRuntime& t) {
        const std::size_t next = markov::step(t.chain->chain, t.state, t.stream);
        std::vector<std::size_t> live;
        live.reserve(t.state_task.size());
        for (const auto& [s, task] : t.state_task)
            live.push_back(s);
        const WorkloadActions act =
            service_state_actions(t.cfg->multitasking, next, t.chain->chain.size(), live);
        for (std::size_t s : act.stop_states)
            stop_task(t, s);
        if (act.start_state)
            start_task(t, *act.start_state);
        t.state = next;
    }

    void on_epoch() {
        for (TerminalRuntime& t : terms_)
            step_terminal(t);
        const double next = now_ + cfg_.state_epoch;
        if (next < cfg_.duration)
            push_event(next, kChainEpoch);
    }

    void on_tx_done(const Event& e) {
        LinkRuntime& l = links_.at(e.a);
        DropTailQueue& ch = e.b == 0 ? l.up : l.down;
        const Packet pkt = ch.front();
        ch.pop();

        const std::uint64_t bits =
            8 * (static_cast<std::uint64_t>(pkt.payload_bytes) + cfg_.transport.header_overhead);
        l.stats.wire_bits += bits;
        if (windows_ > 0)
            l.wire_bits_w[window_index(now_)] += bits;

        if (!ch.empty())
            push_event(now_ + tx_time(l, ch.front()), kTxDone, e.a, e.b);

        if (l.cfg->loss > 0.0 && l.loss.next_unit() < l.cfg->loss) {
            ++l.stats.loss_drops;
            return;
        }
        ++l.stats.packets_delivered;
        if (e.b == 0) {
            const std::uint64_t c = static_cast<std::uint64_t>(pkt.payload_bytes) |
                                    (static_cast<std::uint64_t>(pkt.dst_link) << 32);
            push_event(now_ + l.cfg->delay_s, kHubArrive, pkt.transfer, pkt.seq, c);
        } else {
            push_event(now_ + l.cfg->delay_s, kDstArrive, pkt.transfer, pkt.seq);
        }
    }

    void on_hub_arrive(const Event& e) {
        const auto payload = static_cast<std::uint32_t>(e.c & 0xffffffffULL);
        const int dst_link = static_cast<int>(e.c >> 32);
        enqueue(links_.at(dst_link), false, Packet{e.a, e.b, payload, dst_link});
    }

    void on_dst_arrive(const Event& e) {
        auto it = transfers_.find(e.a);
        if (it == transfers_.end())
            return;
        TransferRuntime& rt = it->second;
        SeqState& ss = rt.seqs[static_cast<std::size_t>(e.b)];
        if (!ss.delivered) {
            ss.delivered = true;
            const std::uint64_t bits = 8 * rt.ft.payload_bytes(e.b);
            delivered_bits_ += bits;
            if (windows_ > 0)
                term_of(rt.ft.src()).delivered_bits_w[window_index(now_)] += bits;
        }
        const double back = links_.at(rt.src_link).cfg->delay_s +
                            links_.at(rt.dst_link).cfg->delay_s;
        push_event(now_ + back, kAckArrive, e.a, e.b);
    }

    void on_ack_arrive(const Event& e) {
        auto it = transfers_.find(e.a);
        if (it == transfers_.end())
            return;
        TransferRuntime& rt = it->second;
        SeqState& ss = rt.seqs[static_cast<std::size_t>(e.b)];
        if (ss.acked)
            return;

        TerminalRuntime& t = term_of(rt.ft.src());
        for (std::uint8_t i = 0; i < ss.attempts; ++i)
            ++t.transmitted_w[ss.attempt_window[i]];
        ++t.acked_w[ss.attempt_window[ss.attempts - 1]];
        ++acked_total_;

        ss.acked = true;
        --rt.outstanding;
        rt.ft.ack_packet(e.b, now_);
        if (rt.ft.complete()) {
            completions_.push_back({rt.ft.size_bytes(), rt.ft.end_time() - rt.ft.start_time()});
            TransferStat s = make_stat(rt);
            s.completed = true;
            archive_.push_back(s);
            ++completed_;
            release_task(t, rt.task_id);
            transfers_.erase(it);
        } else {
            fill_window(rt);
        }
    }

    void on_rto_timer(const Event& e) {
        auto it = transfers_.find(e.a);
        if (it == transfers_.end())
            return;
        TransferRuntime& rt = it->second;
        SeqState& ss = rt.seqs[static_cast<std::size_t>(e.b)];
        if (ss.acked || ss.timer_token != e.c)
            return;

        if (ss.attempts >= 1 + static_cast<int>(cfg_.transport.max_retransmits)) {
            // The exhausted sequence resolves as lost; its attempts stay in
            // the goodput denominator.
            TerminalRuntime& t = term_of(rt.ft.src());
            for (std::uint8_t i = 0; i < ss.attempts; ++i)
                ++t.transmitted_w[ss.attempt_window[i]];
            TransferStat s = make_stat(rt);
            s.failed = true;
            archive_.push_back(s);
            ++failed_;
            release_task(t, rt.task_id);
            transfers_.erase(it);
            return;
        }

        rt.window = std::max(1u, rt.window / 2);
        ss.rto = rto_.next(ss.rto);
        send_packet(rt, e.b, false);
    }

    const scenario::ScenarioConfig& cfg_;
    std::uint64_t seed_;
    std::size_t cap_;
    RtoPolicy rto_;
    std::size_t windows_ = 0;
    double last_window_ = 0.0;

    EventQueue q_;
    double now_ = 0.0;
    std::vector<TerminalRuntime> terms_;
    std::map<int, std::size_t> term_index_;
    std::map<int, LinkRuntime> links_;
    std::map<int, TransferRuntime> transfers_;
    int next_transfer_id_ = 0;

    std::vector<metrics::CompletionRecord> completions_;
    std::vector<TransferStat> archive_;
    std::uint64_t delivered_bits_ = 0;
    std::uint64_t sent_total_ = 0;
    std::uint64_t acked_total_ = 0;
    std::uint64_t completed_ = 0;
    std::uint64_t failed_ = 0;
    std::uint64_t cancelled_ = 0;
    std::uint64_t events_ = 0;
};

SimulationReport Engine::run() {
    scenario::validate_config(cfg_);

    terms_.reserve(cfg_.terminals.size());
    for (const scenario::TerminalConfig& t : cfg_.terminals) {
        term_index_[t.id] = terms_.size();
        terms_.emplace_back(&t, &cfg_.chains.at(t.chain), seed_, windows_);
    }
    for (const auto& [id, link] : cfg_.links)
        links_.emplace(id, LinkRuntime(&link, seed_, windows_));

    if (cfg_.warmup < cfg_.duration)
        push_event(cfg_.warmup, kChainEpoch);

    while (!q_.empty()) {
        const Event e = q_.pop();
        if (e.time > cfg_.duration)
            break;
        now_ = e.time;
        ++events_;
        switch (e.kind) {
        case kChainEpoch:
            on_epoch();
            break;
        case kTxDone:
            on_tx_done(e);
            break;
        case kHubArrive:
            on_hub_arrive(e);
            break;
        case kDstArrive:
            on_dst_arrive(e);
            break;
        case kAckArrive:
            on_ack_arrive(e);
            break;
        case kRtoTimer:
            on_rto_timer(e);
            break;
        }
    }

    SimulationReport rep;
    for (const auto& [id, rt] : transfers_)
        archive_.push_back(make_stat(rt)); // still open at run end
    std::sort(archive_.begin(), archive_.end(),
              [](const TransferStat& a, const TransferStat& b) { return a.id < b.id; });
    rep.transfers = std::move(archive_);

    metrics::MetricsSeries& s = rep.series;
    s.start_s = cfg_.warmup;
    s.window_s = cfg_.metrics_window;
    s.window_count = windows_;
    s.last_window_s = last_window_;
    for (const TerminalRuntime& t : terms_) {
        auto& tp = s.throughput_bps[t.cfg->id];
        auto& gp = s.goodput_pct[t.cfg->id];
        tp.resize(windows_);
        gp.resize(windows_);
        for (std::size_t w = 0; w < windows_; ++w) {
            tp[w] = metrics::throughput_bps(t.delivered_bits_w[w], s.window_length(w));
            if (t.transmitted_w[w] > 0)
                gp[w] = metrics::goodput_pct(t.acked_w[w], t.transmitted_w[w]);
        }
        rep.peak_ledger[t.cfg->id] = t.peak_ledger;
    }
    for (const auto& [id, l] : links_) {
        auto& util = s.channel_util_pct[id];
        util.resize(windows_);
        for (std::size_t w = 0; w < windows_; ++w) {
            const double achieved =
                static_cast<double>(l.wire_bits_w[w]) / s.window_length(w);
            util[w] = metrics::channel_efficiency_pct(achieved, l.cfg->bandwidth_bps);
        }
        rep.link_stats[id] = l.stats;
    }
    s.completions = completions_;

    rep.delivered_payload_bits = delivered_bits_;
    rep.packets_sent = sent_total_;
    rep.packets_acked = acked_total_;
    rep.completed = completed_;
    rep.failed = failed_;
    rep.cancelled = cancelled_;
    rep.events_dispatched = events_;
    return rep;
}

} // namespace

SimulationReport run_scenario(const scenario::ScenarioConfig& config, std::uint64_t seed,
                              std::size_t event_cap) {
    Engine engine(config, seed, event_cap);
    return engine.run();
}

std::vector<double> network_util_series(const SimulationReport& report,
                                        const scenario::ScenarioConfig& config) {
    const std::size_t windows = report.series.window_count;
    std::vector<double> out(windows, 0.0);
    double total_bw = 0.0;
    for (const auto& [id, link] : config.links)
        total_bw += link.bandwidth_bps;
    if (total_bw <= 0.0)
        return out;
    for (std::size_t w = 0; w < windows; ++w) {
        double achieved = 0.0;
        for (const auto& [id, util] : report.series.channel_util_pct)
            achieved += util[w] / 100.0 * config.links.at(id).bandwidth_bps;
        out[w] = 100.0 * achieved / total_bw;
    }
    return out;
}

} // namespace hetsim::netsim
