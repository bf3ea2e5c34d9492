#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "hetsim/markov.hpp"
#include "hetsim/netsim.hpp"
#include "hetsim/rng.hpp"
#include "hetsim/scenario.hpp"

using namespace hetsim;
using namespace hetsim::netsim;

namespace {

markov::ServiceChain chain_of(const std::vector<std::vector<double>>& rows) {
    std::vector<std::string> labels;
    for (std::size_t i = 0; i < rows.size(); ++i)
        labels.push_back("s" + std::to_string(i));
    return markov::validate_chain(std::move(labels), rows);
}

// Two terminals on one shared link; terminal 0 runs `sender_rows` and uploads
// `file` bytes per task to terminal 1, which idles forever.
scenario::ScenarioConfig two_node(const std::vector<std::vector<double>>& sender_rows,
                                  std::uint64_t file, double bandwidth, double delay,
                                  double loss = 0.0) {
    scenario::ScenarioConfig cfg;
    cfg.links.emplace(0, scenario::LinkConfig{0, bandwidth, delay, 50, loss});

    scenario::ChainConfig sender{scenario::TerminalKind::wired, chain_of(sender_rows), {}};
    for (std::size_t s = 1; s < sender_rows.size(); ++s)
        sender.profiles.emplace(s, scenario::ServiceProfile{"bulk", 1, 5.0, 5.0, file, 1});
    cfg.chains.emplace("sender", std::move(sender));

    scenario::ChainConfig sink{scenario::TerminalKind::wired,
                               chain_of({{1.0, 0.0}, {0.0, 1.0}}), {}};
    sink.profiles.emplace(1, scenario::ServiceProfile{"bulk", 1, 5.0, 5.0, file, 0});
    cfg.chains.emplace("sink", std::move(sink));

    cfg.terminals.push_back({0, scenario::TerminalKind::wired, "sender", 0, 100, 100, true, true});
    cfg.terminals.push_back({1, scenario::TerminalKind::wired, "sink", 0, 100, 100, true, true});
    return cfg;
}

bool reports_equal(const SimulationReport& a, const SimulationReport& b) {
    if (a.delivered_payload_bits != b.delivered_payload_bits || a.packets_sent != b.packets_sent ||
        a.packets_acked != b.packets_acked || a.completed != b.completed ||
        a.failed != b.failed || a.cancelled != b.cancelled ||
        a.events_dispatched != b.events_dispatched)
        return false;
    if (a.transfers.size() != b.transfers.size())
        return false;
    for (std::size_t i = 0; i < a.transfers.size(); ++i) {
        const TransferStat& x = a.transfers[i];
        const TransferStat& y = b.transfers[i];
        if (x.id != y.id || x.src != y.src || x.dst != y.dst || x.size_bytes != y.size_bytes ||
            x.start_s != y.start_s || x.end_s != y.end_s || x.packets_sent != y.packets_sent ||
            x.packets_acked != y.packets_acked || x.completed != y.completed ||
            x.failed != y.failed || x.cancelled != y.cancelled)
            return false;
    }
    const auto& sa = a.series;
    const auto& sb = b.series;
    return sa.throughput_bps == sb.throughput_bps && sa.goodput_pct == sb.goodput_pct &&
           sa.channel_util_pct == sb.channel_util_pct;
}

} // namespace

TEST_CASE("EventQueue dispatches by time, ties by insertion order") {
    EventQueue q;
    q.push(2.0, 10);
    q.push(1.0, 20);
    q.push(1.0, 21);
    q.push(0.5, 30);
    CHECK(q.pop().kind == 30);
    CHECK(q.pop().kind == 20); // same time as 21, inserted first
    CHECK(q.pop().kind == 21);
    CHECK(q.pop().kind == 10);
    CHECK(q.empty());

    // random load: pop order is nondecreasing in (time, seq)
    std::mt19937_64 gen(5);
    std::uniform_real_distribution<double> when(0.0, 10.0);
    EventQueue big;
    for (int i = 0; i < 2000; ++i)
        big.push(gen() % 4 == 0 ? 5.0 : when(gen), i);
    double prev_time = -1.0;
    std::uint64_t prev_seq = 0;
    while (!big.empty()) {
        Event e = big.pop();
        REQUIRE(e.time >= prev_time);
        if (e.time == prev_time)
            REQUIRE(e.seq > prev_seq);
        prev_time = e.time;
        prev_seq = e.seq;
    }
}

TEST_CASE("DropTailQueue accepts up to its limit") {
    DropTailQueue q(50);
    int drops = 0;
    for (int i = 0; i < 60; ++i)
        if (!q.try_push(Packet{0, i, 1024, 0}))
            ++drops;
    CHECK(drops == 10); // burst of 60 into a limit-50 queue
    CHECK(q.size() == 50);

    q.pop();
    CHECK(q.try_push(Packet{0, 99, 1024, 0}));
    CHECK_FALSE(q.try_push(Packet{0, 100, 1024, 0})); // boundary: full again
}

TEST_CASE("DropTailQueue occupancy never exceeds the limit") {
    std::mt19937_64 gen(17);
    DropTailQueue q(8);
    for (int op = 0; op < 5000; ++op) {
        if (q.empty() || gen() % 3 != 0)
            q.try_push(Packet{0, op, 512, 0});
        else
            q.pop();
        REQUIRE(q.size() <= q.limit());
    }
}

TEST_CASE("RtoPolicy doubles and clamps the timeout") {
    RtoPolicy rto{4.0, 1.0, 60.0};
    std::vector<double> schedule;
    double cur = rto.first();
    for (int i = 0; i < 6; ++i) {
        schedule.push_back(cur);
        cur = rto.next(cur);
    }
    CHECK(schedule == std::vector<double>{4.0, 8.0, 16.0, 32.0, 60.0, 60.0});

    RtoPolicy low{0.5, 1.0, 60.0};
    CHECK(low.first() == 1.0); // clamped up to the minimum
}

TEST_CASE("FileTransfer tracks sends, acks and completion") {
    FileTransfer ft(7, 0, 1, 2500, 1024, 10.0);
    CHECK(ft.total_packets() == 3);
    CHECK(ft.payload_bytes(0) == 1024);
    CHECK(ft.payload_bytes(2) == 452); // tail packet is short

    for (int seq = 0; seq < 3; ++seq)
        ft.record_send(seq);
    ft.ack_packet(0, 10.1);
    ft.ack_packet(1, 10.2);
    CHECK_FALSE(ft.complete());
    ft.ack_packet(2, 10.3); // last outstanding ack completes the transfer
    CHECK(ft.complete());
    CHECK(ft.end_time() == 10.3);
    CHECK(ft.packets_sent() == 3);
    CHECK(ft.packets_acked() == 3);

    CHECK_THROWS_AS(ft.ack_packet(1, 10.4), UnknownPacket); // each seq acked once
    FileTransfer fresh(8, 0, 1, 2048, 1024, 0.0);
    CHECK_THROWS_AS(fresh.ack_packet(0, 1.0), UnknownPacket); // never sent
}

TEST_CASE("service_state_actions maps states to task actions") {
    SUBCASE("idle stops everything") {
        auto act = service_state_actions(true, 0, 4, {1, 3});
        CHECK(act.stop_states == std::vector<std::size_t>{1, 3});
        CHECK_FALSE(act.start_state.has_value());
    }
    SUBCASE("multitasking accumulates") {
        auto act = service_state_actions(true, 2, 4, {1});
        CHECK(act.stop_states.empty());
        CHECK(act.start_state == 2);
        act = service_state_actions(true, 3, 4, {1, 2});
        CHECK(act.stop_states.empty());
        CHECK(act.start_state == 3);
    }
    SUBCASE("without multitasking the previous task stops first") {
        auto act = service_state_actions(false, 2, 4, {1});
        CHECK(act.stop_states == std::vector<std::size_t>{1});
        CHECK(act.start_state == 2);
    }
    SUBCASE("re-entering a live state is a no-op") {
        auto act = service_state_actions(true, 2, 4, {2});
        CHECK(act.stop_states.empty());
        CHECK_FALSE(act.start_state.has_value());
    }
    SUBCASE("state out of range is rejected") {
        CHECK_THROWS_AS(service_state_actions(true, 4, 4, {}), markov::ChainError);
    }
}

TEST_CASE("zero duration produces an empty report") {
    auto cfg = scenario::reference_scenario(scenario::ReferenceKind::minimal);
    cfg.duration = 0.0;
    cfg.warmup = 0.0;
    auto rep = run_scenario(cfg, 1);
    CHECK(rep.transfers.empty());
    CHECK(rep.series.window_count == 0);
    CHECK(rep.delivered_payload_bits == 0);
    CHECK(rep.events_dispatched == 0);
}

TEST_CASE("single uncontended flow matches the pipeline recurrence oracle") {
    // forced into the transfer state at the first (and only) epoch
    const std::uint64_t file = 1 << 20;
    auto cfg = two_node({{0.0, 1.0}, {0.0, 1.0}}, file, 54e6, 10e-6);
    cfg.warmup = 0.0;
    cfg.duration = 5.0;
    cfg.state_epoch = 1000.0; // exactly one epoch fires

    auto rep = run_scenario(cfg, 3);
    REQUIRE(rep.completed == 1);
    REQUIRE(rep.series.completions.size() == 1);
    const double measured = rep.series.completions[0].seconds;

    // event-level replay: FIFO serialization on both hops, window of 4, one
    // new send per ack
    const auto& tr = cfg.transport;
    const int n = static_cast<int>((file + tr.packet_size - 1) / tr.packet_size);
    const double d = cfg.links.at(0).delay_s;
    const int w = static_cast<int>(tr.initial_window);
    std::vector<double> up(n), down(n), ack(n);
    auto wire = [&](int seq) {
        const std::uint64_t payload =
            (seq + 1 == n) ? file - static_cast<std::uint64_t>(n - 1) * tr.packet_size
                           : tr.packet_size;
        return 8.0 * static_cast<double>(payload + tr.header_overhead) / 54e6;
    };
    for (int i = 0; i < n; ++i) {
        const double enq = (i < w) ? 0.0 : ack[i - w];
        up[i] = std::max(i ? up[i - 1] : 0.0, enq) + wire(i);
        down[i] = std::max(i ? down[i - 1] : 0.0, up[i] + d) + wire(i);
        ack[i] = down[i] + d + 2.0 * d;
    }
    const double oracle = ack[n - 1];

    CHECK(measured == doctest::Approx(oracle).epsilon(1e-9));

    // with negligible propagation the flow is serialization-bound
    const double serialization = 8.0 * static_cast<double>(file) / 54e6;
    CHECK(measured < serialization * 1.05);
    CHECK(measured > serialization);
}

TEST_CASE("completed zero-loss transfer conserves packets and bits") {
    const std::uint64_t file = 1 << 20; // 1024 full packets
    auto cfg = two_node({{0.0, 1.0}, {0.0, 1.0}}, file, 54e6, 0.005);
    cfg.warmup = 0.0;
    cfg.duration = 30.0;
    cfg.state_epoch = 1000.0;

    auto rep = run_scenario(cfg, 11);
    REQUIRE(rep.completed == 1);
    REQUIRE(rep.transfers.size() == 1);
    const TransferStat& t = rep.transfers[0];
    CHECK(t.completed);
    CHECK(t.packets_acked == 1024); // ceiling(size / packet_size)
    CHECK(t.packets_sent == t.packets_acked); // no loss, no spurious timeouts
    CHECK(t.end_s > t.start_s);

    const LinkStats& l = rep.link_stats.at(0);
    CHECK(l.packets_enqueued == 2 * 1024); // every packet crosses both hops
    CHECK(l.queue_drops == 0);
    CHECK(l.loss_drops == 0);
    CHECK(l.packets_delivered == 2 * 1024);
    CHECK(l.wire_bits == 2ULL * 1024 * 8 * (1024 + 40));
    CHECK(rep.delivered_payload_bits == 8 * file);
}

TEST_CASE("runs are deterministic for a fixed config and seed") {
    auto minimal = scenario::reference_scenario(scenario::ReferenceKind::minimal);
    auto a = run_scenario(minimal, 42);
    auto b = run_scenario(minimal, 42);
    CHECK(reports_equal(a, b));
    CHECK(a.events_dispatched > 0);

    auto campus = scenario::reference_scenario(scenario::ReferenceKind::campus);
    campus.duration = 60.0;
    auto c = run_scenario(campus, 42);
    auto e = run_scenario(campus, 42);
    CHECK(reports_equal(c, e));

    auto other = run_scenario(minimal, 43);
    CHECK_FALSE(reports_equal(a, other)); // the seed matters
}

TEST_CASE("zero-loss runs report 100.0 goodput in every present window") {
    auto cfg = scenario::reference_scenario(scenario::ReferenceKind::minimal);
    cfg.duration = 120.0;
    auto rep = run_scenario(cfg, 7);
    REQUIRE(rep.packets_acked > 0);
    std::size_t present = 0;
    for (const auto& [term, series] : rep.series.goodput_pct) {
        for (const auto& g : series) {
            if (g.has_value()) {
                ++present;
                CHECK(*g == 100.0);
            }
        }
    }
    CHECK(present > 0);
    CHECK(rep.failed == 0);
}

TEST_CASE("multitasking accumulates tasks while single mode holds one") {
    // deterministic walk 0 -> 1 -> 2 -> 3 -> 3 ...; big files keep all three
    // transfers alive
    const std::vector<std::vector<double>> walk = {{0.0, 1.0, 0.0, 0.0},
                                                   {0.0, 0.0, 1.0, 0.0},
                                                   {0.0, 0.0, 0.0, 1.0},
                                                   {0.0, 0.0, 0.0, 1.0}};
    auto cfg = two_node(walk, 100 << 20, 54e6, 0.005);
    cfg.warmup = 30.0;
    cfg.duration = 40.0;

    auto multi = run_scenario(cfg, 5);
    CHECK(multi.peak_ledger.at(0) == 3);
    CHECK(multi.peak_ledger.at(1) == 0); // the sink never starts tasks
    CHECK(multi.cancelled == 0);

    cfg.terminals[0].multitasking = false;
    auto single = run_scenario(cfg, 5);
    CHECK(single.peak_ledger.at(0) == 1);
    CHECK(single.cancelled == 2); // each state change replaced the open transfer
}

TEST_CASE("a packet dropped once then delivered counts two sends and one ack") {
    // single-packet file; find a seed whose link-loss stream drops the first
    // wire crossing and passes the next two
    const double p = 0.5;
    std::uint64_t seed = 0;
    bool found = false;
    for (; seed < 10'000; ++seed) {
        RandomStream probe(seed, RandomStream::kLinkSalt + 0);
        const double u1 = probe.next_unit();
        const double u2 = probe.next_unit();
        const double u3 = probe.next_unit();
        if (u1 < p && u2 >= p && u3 >= p) {
            found = true;
            break;
        }
    }
    REQUIRE(found);

    auto cfg = two_node({{0.0, 1.0}, {0.0, 1.0}}, 512, 54e6, 0.005, p);
    cfg.warmup = 0.0;
    cfg.duration = 30.0; // covers the 4 s retransmission timeout
    cfg.state_epoch = 1000.0;

    auto rep = run_scenario(cfg, seed);
    REQUIRE(rep.completed == 1);
    const TransferStat& t = rep.transfers[0];
    CHECK(t.packets_sent == 2);
    CHECK(t.packets_acked == 1);
    CHECK(rep.link_stats.at(0).loss_drops == 1);
}

TEST_CASE("exhausted retransmissions fail the transfer") {
    auto cfg = two_node({{0.0, 1.0}, {0.0, 1.0}}, 512, 54e6, 0.005, 1.0); // every packet lost
    cfg.warmup = 0.0;
    cfg.duration = 250.0; // larger than 4+8+16+32+60+60 seconds of timeouts
    cfg.state_epoch = 1000.0;

    auto rep = run_scenario(cfg, 1);
    REQUIRE(rep.failed == 1);
    REQUIRE(rep.completed == 0);
    const TransferStat& t = rep.transfers[0];
    CHECK(t.failed);
    CHECK(t.packets_sent == 1 + cfg.transport.max_retransmits);
    CHECK(t.packets_acked == 0);
    CHECK(rep.delivered_payload_bits == 0);
}

TEST_CASE("the event cap aborts a run with SimulationDiverged") {
    auto cfg = two_node({{0.0, 1.0}, {0.0, 1.0}}, 1 << 20, 54e6, 0.005);
    cfg.warmup = 0.0; // the first epoch's window fill immediately outgrows the cap
    CHECK_THROWS_AS(run_scenario(cfg, 1, 3), SimulationDiverged);
}

TEST_CASE("metric windows tile the measured span") {
    auto cfg = scenario::reference_scenario(scenario::ReferenceKind::minimal);
    cfg.duration = 41.5;
    cfg.warmup = 30.0;
    cfg.metrics_window = 1.0;
    auto rep = run_scenario(cfg, 2);
    const auto& s = rep.series;
    CHECK(s.start_s == 30.0);
    CHECK(s.window_count == 12); // 11 full windows and a final half window
    CHECK(s.window_length(10) == 1.0);
    CHECK(s.last_window_s == doctest::Approx(0.5));
    double covered = 0.0;
    for (std::size_t w = 0; w < s.window_count; ++w)
        covered += s.window_length(w);
    CHECK(covered == doctest::Approx(11.5));

    // throughput windows integrate back to the delivered payload
    for (const auto& [term, tp] : s.throughput_bps) {
        REQUIRE(tp.size() == s.window_count);
    }
    double total_bits = 0.0;
    for (const auto& [term, tp] : s.throughput_bps)
        for (std::size_t w = 0; w < tp.size(); ++w)
            total_bits += tp[w] * s.window_length(w);
    CHECK(total_bits == doctest::Approx(static_cast<double>(rep.delivered_payload_bits)));
}

TEST_CASE("network_util_series weights links by bandwidth") {
    scenario::ScenarioConfig cfg;
    cfg.links.emplace(0, scenario::LinkConfig{0, 100e6, 0.0, 50, 0.0});
    cfg.links.emplace(1, scenario::LinkConfig{1, 50e6, 0.0, 50, 0.0});

    SimulationReport rep;
    rep.series.window_count = 2;
    rep.series.channel_util_pct[0] = {80.0, 0.0};
    rep.series.channel_util_pct[1] = {20.0, 60.0};

    auto util = network_util_series(rep, cfg);
    REQUIRE(util.size() == 2);
    CHECK(util[0] == doctest::Approx((0.8 * 100e6 + 0.2 * 50e6) / 150e6 * 100.0));
    CHECK(util[1] == doctest::Approx((0.0 * 100e6 + 0.6 * 50e6) / 150e6 * 100.0));
}

TEST_CASE("campus scenario runs to completion at default duration") {
    auto cfg = scenario::reference_scenario(scenario::ReferenceKind::campus);
    auto rep = run_scenario(cfg, 42);
    CHECK(rep.events_dispatched > 0);
    CHECK(rep.completed > 0);
    CHECK(rep.delivered_payload_bits > 0);
    // wireless access links carry loss, so some retransmission happened
    CHECK(rep.packets_sent > rep.packets_acked);
    for (const auto& [id, util] : rep.series.channel_util_pct)
        for (double u : util) {
            CHECK(u >= 0.0);
            CHECK(u <= 100.0);
        }
}
