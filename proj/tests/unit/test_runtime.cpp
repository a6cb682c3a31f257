#include "blade/runtime/managed_runtime.hpp"
#include "blade/runtime/node_host.hpp"
#include "blade/runtime/processor.hpp"

#include "../support/oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <queue>
#include <random>

using namespace blade;
using namespace blade::runtime;
using sim::kGiB;
using sim::kMiB;
using sim::NodeId;
using sim::SimTime;

namespace
{
    RuntimeConfig small_heap()
    {
        RuntimeConfig c;
        c.live_bytes = 100 * kMiB;
        c.trigger_bytes = 200 * kMiB;
        c.hard_limit_bytes = 400 * kMiB;
        c.low_water_bytes = 100 * kMiB;
        return c;
    }
}

TEST_CASE("cost model calibration")
{
    CollectorCostModel m;
    CHECK(m.pause(150 * kMiB) == SimTime::micros(12423));
    CHECK(m.pause(kGiB) == SimTime::micros(8761 + 25000));

    CollectorCostModel zero{SimTime::millis(25), sim::kZeroTime};
    CHECK(zero.pause(0) == sim::kZeroTime);

    for (sim::Bytes live = kMiB; live < 4 * kGiB; live += 97 * kMiB)
    {
        CHECK(m.pause_micros(live + kMiB) > m.pause_micros(live));
    }
}

TEST_CASE("heap bounds are validated")
{
    HeapModel h{100, 100, 200, 400, 100};
    CHECK_NOTHROW(h.validate());
    CHECK_THROWS_AS((HeapModel{100, 50, 200, 400, 100}.validate()), std::invalid_argument);
    CHECK_THROWS_AS((HeapModel{100, 500, 200, 400, 100}.validate()), std::invalid_argument);
    CHECK_THROWS_AS((HeapModel{300, 300, 200, 400, 100}.validate()), std::invalid_argument);
    CHECK_THROWS_AS((HeapModel{100, 100, 350, 400, 100}.validate()), std::invalid_argument);

    RuntimeConfig c;
    const auto heap = c.initial_heap();
    CHECK(heap.trigger_bytes == 300 * kMiB);
    CHECK(heap.low_water_bytes == kGiB / 5);
}

TEST_CASE("estimator falls back to the default below two samples")
{
    PauseEstimator e(SimTime::millis(10));
    CHECK(e.estimate(kGiB) == SimTime::millis(10));
    e.record(kGiB, SimTime::millis(25));
    CHECK(e.estimate(kGiB) == SimTime::millis(10));
}

TEST_CASE("estimator extrapolates two points")
{
    PauseEstimator e;
    e.record(kGiB, SimTime::millis(25));
    e.record(2 * kGiB, SimTime::millis(50));
    CHECK(e.estimate(3 * kGiB) == SimTime::millis(75));
}

TEST_CASE("estimator returns the mean when every sample has the same heap size")
{
    PauseEstimator e;
    e.record(kGiB, SimTime::millis(10));
    e.record(kGiB, SimTime::millis(20));
    e.record(kGiB, SimTime::millis(33));
    CHECK(e.estimate(5 * kGiB) == SimTime::millis(21));
}

TEST_CASE("estimator clamps negative extrapolations at zero")
{
    PauseEstimator e;
    e.record(2 * kGiB, SimTime::millis(10));
    e.record(3 * kGiB, SimTime::millis(30));
    CHECK(e.estimate(0) == sim::kZeroTime);
}

TEST_CASE("estimator reproduces exact lines and matches the normal equations")
{
    std::mt19937_64 rng(42);
    for (int trial = 0; trial < 200; ++trial)
    {
        std::uniform_int_distribution<std::int64_t> slope_per_mib(0, 40);
        std::uniform_int_distribution<std::int64_t> icept(0, 10'000);
        std::uniform_int_distribution<sim::Bytes> size(kMiB, 4 * kGiB);
        std::uniform_int_distribution<std::int64_t> noise(-500, 500);
        std::uniform_int_distribution<int> count(2, 12);
        const bool exact = trial % 2 == 0;
        const double a = static_cast<double>(icept(rng));
        const double b = static_cast<double>(slope_per_mib(rng) * 1024);
        PauseEstimator e;
        std::vector<std::pair<long double, long double>> pts;
        const int n = count(rng);
        for (int i = 0; i < n; ++i)
        {
            // Whole-MiB sizes with an integer slope per MiB keep the exact line on whole microseconds.
            const sim::Bytes live = (size(rng) / kMiB) * kMiB;
            const double gb = static_cast<double>(live) / static_cast<double>(kGiB);
            double y = a + b * gb;
            if (!exact)
            {
                y += static_cast<double>(noise(rng));
            }
            const auto us = std::llround(y);
            e.record(live, SimTime::micros(us));
            pts.emplace_back(static_cast<long double>(live), static_cast<long double>(us));
        }
        bool degenerate = true;
        for (auto &p : pts)
        {
            degenerate = degenerate && p.first == pts.front().first;
        }
        if (degenerate)
        {
            continue;
        }
        const sim::Bytes q = size(rng);
        const long double want = std::max<long double>(0.0L, oracle::least_squares(pts, static_cast<long double>(q)));
        CHECK(std::fabs(static_cast<double>(e.estimate(q).count()) - static_cast<double>(want)) <= 1.0);
        if (exact)
        {
            const double line = a + b * static_cast<double>(q) / static_cast<double>(kGiB);
            CHECK(std::fabs(static_cast<double>(e.estimate(q).count()) - line) <= 1.0);
        }
    }
}

TEST_CASE("no handler collects at the trigger")
{
    sim::Simulator s;
    ManagedRuntime rt(s, NodeId{0}, small_heap());
    rt.allocate(100 * kMiB);
    CHECK(rt.paused());
    CHECK(rt.upcalls() == 1);
    CHECK(rt.heap().allocated_bytes == 100 * kMiB);
    REQUIRE(rt.ticket(1));
    CHECK(rt.ticket(1)->state == TicketState::Running);
    s.run_until(SimTime::seconds(1));
    CHECK_FALSE(rt.paused());
    CHECK(rt.ticket(1)->state == TicketState::Completed);
    CHECK(rt.pauses().front().end - rt.pauses().front().start == rt.config().cost.pause(100 * kMiB));
}

TEST_CASE("upcall carries id, occupancy and estimate")
{
    sim::Simulator s;
    ManagedRuntime rt(s, NodeId{0}, small_heap());
    std::vector<CollectionTicket> seen;
    rt.reg_gc_hand([&](const CollectionTicket &t)
                   {
                       seen.push_back(t);
                       return true;
                   });
    rt.allocate(99 * kMiB);
    CHECK(seen.empty());
    rt.allocate(2 * kMiB);
    REQUIRE(seen.size() == 1);
    CHECK(seen[0].id == 1);
    CHECK(seen[0].allocated == 201 * kMiB);
    CHECK(seen[0].estimated_pause == SimTime::millis(10));
    CHECK(seen[0].state == TicketState::Offered);
}

TEST_CASE("crossing 799 to 801 MB with an 800 MB trigger gives one upcall")
{
    sim::Simulator s;
    RuntimeConfig c;
    c.live_bytes = 100 * kMiB;
    c.trigger_bytes = 800 * kMiB;
    c.hard_limit_bytes = 1200 * kMiB;
    c.low_water_bytes = 200 * kMiB;
    ManagedRuntime rt(s, NodeId{0}, c);
    std::vector<sim::Bytes> at;
    rt.reg_gc_hand([&](const CollectionTicket &t)
                   {
                       at.push_back(t.allocated);
                       return false;
                   });
    rt.allocate(699 * kMiB);
    CHECK(at.empty());
    rt.allocate(2 * kMiB);
    rt.allocate(kMiB);
    rt.allocate(kMiB);
    CHECK(at == std::vector<sim::Bytes>{801 * kMiB});
}

TEST_CASE("re-registration replaces the handler")
{
    sim::Simulator s;
    ManagedRuntime rt(s, NodeId{0}, small_heap());
    int first = 0, second = 0;
    rt.reg_gc_hand([&](const CollectionTicket &) { return ++first, true; });
    rt.reg_gc_hand([&](const CollectionTicket &) { return ++second, true; });
    rt.allocate(100 * kMiB);
    CHECK(first == 0);
    CHECK(second == 1);
}

TEST_CASE("deferred collection starts at start_gc and ignores repeats")
{
    sim::Simulator s;
    ManagedRuntime rt(s, NodeId{0}, small_heap());
    rt.reg_gc_hand([](const CollectionTicket &) { return false; });
    rt.allocate(100 * kMiB);
    CHECK_FALSE(rt.paused());
    CHECK(rt.ticket(1)->state == TicketState::Deferred);
    rt.allocate(10 * kMiB);
    CHECK(rt.upcalls() == 1);

    int finished = 0;
    s.schedule(SimTime::millis(5), NodeId{0}, "start", [&] { rt.start_gc(1, [&] { ++finished; }); });
    s.schedule(SimTime::millis(6), NodeId{0}, "again", [&] { rt.start_gc(1, [&] { ++finished; }); });
    s.run_until(SimTime::seconds(1));
    REQUIRE(rt.pauses().size() == 1);
    CHECK(rt.pauses()[0].start == SimTime::millis(5));
    CHECK(rt.ticket(1)->state == TicketState::Completed);
    CHECK(finished == 2);
    rt.start_gc(1);
    rt.start_gc(99);
    CHECK(rt.pauses().size() == 1);
}

TEST_CASE("exhaustion forces the collection and suppresses the late start")
{
    sim::Simulator s;
    ManagedRuntime rt(s, NodeId{0}, small_heap());
    rt.reg_gc_hand([](const CollectionTicket &) { return false; });
    rt.allocate(100 * kMiB);
    rt.allocate(150 * kMiB);
    CHECK_FALSE(rt.paused());
    rt.allocate(60 * kMiB);
    CHECK(rt.paused());
    CHECK(rt.ticket(1)->state == TicketState::ForcedCompleted);
    CHECK(rt.pauses().back().forced);
    s.run_until(SimTime::seconds(1));
    bool called = false;
    rt.start_gc(1, [&] { called = true; });
    CHECK(called);
    CHECK(rt.pauses().size() == 1);
    CHECK(rt.upcalls() == 1);
}

TEST_CASE("occupancy never exceeds the hard limit under deferral")
{
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<sim::Bytes> amount(1, 40 * kMiB);
    sim::Simulator s;
    ManagedRuntime rt(s, NodeId{0}, small_heap());
    rt.reg_gc_hand([](const CollectionTicket &) { return false; });
    for (int i = 0; i < 2000; ++i)
    {
        s.schedule(SimTime::millis(i), NodeId{0}, "alloc",
                   [&]
                   {
                       if (!rt.paused())
                       {
                           rt.allocate(amount(rng));
                       }
                       CHECK(rt.heap().allocated_bytes <= rt.heap().hard_limit_bytes);
                   });
    }
    s.run_until(SimTime::seconds(3));
    CHECK(rt.pauses().size() > 10);
}

TEST_CASE("allocations that cannot fit at all are rejected")
{
    sim::Simulator s;
    ManagedRuntime rt(s, NodeId{0}, small_heap());
    CHECK_THROWS_AS(rt.allocate(301 * kMiB + 1), std::length_error);
    rt.allocate(0);
    CHECK(rt.heap().allocated_bytes == 100 * kMiB);
}

TEST_CASE("a disabled collector never pauses and ignores the hard limit")
{
    sim::Simulator s;
    auto c = small_heap();
    c.collection_enabled = false;
    ManagedRuntime rt(s, NodeId{0}, c);
    for (int i = 0; i < 100; ++i)
    {
        rt.allocate(10 * kMiB);
    }
    CHECK(rt.pauses().empty());
    CHECK(rt.heap().allocated_bytes == 1100 * kMiB);
    rt.collect_now();
    CHECK(rt.pauses().empty());
}

TEST_CASE("collect_now consumes a deferred ticket")
{
    sim::Simulator s;
    ManagedRuntime rt(s, NodeId{0}, small_heap());
    rt.reg_gc_hand([](const CollectionTicket &) { return false; });
    rt.collect_now();
    CHECK(rt.ticket(1)->state == TicketState::Running);
    s.run_until(SimTime::seconds(1));
    rt.allocate(100 * kMiB);
    CHECK(rt.ticket(2)->state == TicketState::Deferred);
    rt.collect_now();
    CHECK(rt.ticket(2)->state == TicketState::ForcedCompleted);
    s.run_until(SimTime::seconds(2));
    rt.start_gc(2);
    CHECK(rt.pauses().size() == 2);
}

TEST_CASE("constant live set gives equal pauses")
{
    sim::Simulator s;
    ManagedRuntime rt(s, NodeId{0}, small_heap());
    for (int i = 0; i < 3; ++i)
    {
        rt.allocate(100 * kMiB);
        s.run_until(s.now() + SimTime::seconds(1));
    }
    REQUIRE(rt.pauses().size() == 3);
    CHECK(rt.pauses()[0].end - rt.pauses()[0].start == rt.pauses()[2].end - rt.pauses()[2].start);
    CHECK(rt.estimator().history().size() == 3);
}

namespace
{
    struct Op
    {
        bool start = false;
        sim::Bytes bytes = 0;
        std::uint64_t id = 0;
    };

    std::vector<PauseRecord> replay(const std::vector<std::vector<Op>> &steps, std::vector<TicketState> &states)
    {
        sim::Simulator s;
        ManagedRuntime rt(s, NodeId{0}, small_heap());
        rt.reg_gc_hand([](const CollectionTicket &) { return false; });
        for (std::size_t i = 0; i < steps.size(); ++i)
        {
            s.schedule(SimTime::millis(static_cast<std::int64_t>(i)), NodeId{0}, "step",
                       [&rt, &steps, i]
                       {
                           for (const auto &op : steps[i])
                           {
                               if (op.start)
                               {
                                   rt.start_gc(op.id);
                               }
                               else if (!rt.paused())
                               {
                                   rt.allocate(op.bytes);
                               }
                           }
                       });
        }
        s.run_until(SimTime::seconds(10));
        for (std::uint64_t id = 1; id <= rt.last_ticket_id(); ++id)
        {
            states.push_back(rt.ticket(id)->state);
        }
        return rt.pauses();
    }
}

TEST_CASE("property: start_gc duplicates and stale reorderings change nothing")
{
    for (std::uint64_t seed = 1; seed <= 40; ++seed)
    {
        std::mt19937_64 rng(seed);
        std::uniform_int_distribution<sim::Bytes> amount(1, 30 * kMiB);
        std::uniform_int_distribution<int> coin(0, 9);

        // Reference run decides which ids were legitimately started when.
        std::vector<std::vector<Op>> base(600);
        {
            sim::Simulator s;
            ManagedRuntime rt(s, NodeId{0}, small_heap());
            rt.reg_gc_hand([](const CollectionTicket &) { return false; });
            for (std::size_t i = 0; i < base.size(); ++i)
            {
                s.run_until(SimTime::millis(static_cast<std::int64_t>(i)));
                if (!rt.paused())
                {
                    const auto b = amount(rng);
                    base[i].push_back({false, b, 0});
                    rt.allocate(b);
                }
                const auto id = rt.last_ticket_id();
                if (id > 0 && rt.ticket(id)->state == TicketState::Deferred && coin(rng) < 3)
                {
                    base[i].push_back({true, 0, id});
                    rt.start_gc(id);
                }
            }
        }

        auto noisy = base;
        std::vector<std::uint64_t> started;
        for (std::size_t i = 0; i < noisy.size(); ++i)
        {
            for (const auto &op : base[i])
            {
                if (op.start)
                {
                    started.push_back(op.id);
                    noisy[i].push_back(op);
                }
            }
            if (!started.empty() && coin(rng) < 2)
            {
                std::uniform_int_distribution<std::size_t> pick(0, started.size() - 1);
                noisy[i].insert(noisy[i].begin(), Op{true, 0, started[pick(rng)]});
            }
        }

        std::vector<TicketState> s1, s2;
        const auto p1 = replay(base, s1);
        const auto p2 = replay(noisy, s2);
        REQUIRE(p1.size() == p2.size());
        for (std::size_t k = 0; k < p1.size(); ++k)
        {
            CHECK(p1[k].ticket_id == p2[k].ticket_id);
            CHECK(p1[k].start == p2[k].start);
            CHECK(p1[k].forced == p2[k].forced);
        }
        CHECK(s1 == s2);
    }
}

TEST_CASE("property: ticket ids run 1, 2, 3 with no gaps")
{
    for (std::uint64_t seed = 1; seed <= 30; ++seed)
    {
        std::mt19937_64 rng(seed);
        std::uniform_int_distribution<sim::Bytes> amount(1, 25 * kMiB);
        std::uniform_int_distribution<int> coin(0, 3);
        sim::Simulator s;
        ManagedRuntime rt(s, NodeId{0}, small_heap());
        std::vector<std::uint64_t> offered;
        rt.reg_gc_hand([&](const CollectionTicket &t)
                       {
                           offered.push_back(t.id);
                           return coin(rng) == 0;
                       });
        for (int i = 0; i < 800; ++i)
        {
            s.run_until(SimTime::millis(i));
            if (rt.paused())
            {
                continue;
            }
            rt.allocate(amount(rng));
            if (coin(rng) == 1)
            {
                rt.start_gc(rt.last_ticket_id());
            }
        }
        CHECK(std::is_sorted(offered.begin(), offered.end()));
        CHECK(std::adjacent_find(offered.begin(), offered.end()) == offered.end());
        for (std::uint64_t id = 1; id <= rt.last_ticket_id(); ++id)
        {
            REQUIRE(rt.ticket(id));
            CHECK(rt.ticket(id)->id == id);
        }
        CHECK_FALSE(rt.ticket(rt.last_ticket_id() + 1));
        CHECK(rt.last_ticket_id() >= offered.size());
    }
}

TEST_CASE("processor matches a FIFO multi-server replay")
{
    for (std::size_t parallelism : {1u, 2u, 5u})
    {
        std::mt19937_64 rng(parallelism);
        std::uniform_int_distribution<std::int64_t> gap(0, 6), service(1, 20);
        sim::Simulator s;
        Processor p(s, NodeId{0}, parallelism);
        std::vector<std::pair<std::int64_t, std::int64_t>> jobs;
        std::int64_t t = 0;
        for (int i = 0; i < 300; ++i)
        {
            t += gap(rng);
            jobs.emplace_back(t, service(rng));
        }
        std::vector<SimTime> started(jobs.size()), done(jobs.size());
        for (std::size_t i = 0; i < jobs.size(); ++i)
        {
            s.schedule(SimTime::micros(jobs[i].first), NodeId{0}, "arrive",
                       [&, i]
                       {
                           p.submit(SimTime::micros(jobs[i].second), [&, i] { started[i] = s.now(); },
                                    [&, i] { done[i] = s.now(); });
                       });
        }
        s.run_until(SimTime::seconds(1));

        std::priority_queue<std::int64_t, std::vector<std::int64_t>, std::greater<>> free_at;
        for (std::size_t k = 0; k < parallelism; ++k)
        {
            free_at.push(0);
        }
        for (std::size_t i = 0; i < jobs.size(); ++i)
        {
            const auto slot = free_at.top();
            free_at.pop();
            const auto begin = std::max(jobs[i].first, slot);
            free_at.push(begin + jobs[i].second);
            CHECK(started[i] == SimTime::micros(begin));
            CHECK(done[i] == SimTime::micros(begin + jobs[i].second));
        }
        CHECK(p.idle());
    }
}

TEST_CASE("frozen processor stretches in-service jobs and starts nothing")
{
    sim::Simulator s;
    Processor p(s, NodeId{0}, 1);
    SimTime first, second_start;
    p.submit(SimTime::millis(10), {}, [&] { first = s.now(); });
    p.submit(SimTime::millis(1), [&] { second_start = s.now(); }, {});
    s.schedule(SimTime::millis(4), NodeId{0}, "freeze", [&] { p.freeze(); });
    s.schedule(SimTime::millis(9), NodeId{0}, "thaw", [&] { p.thaw(); });
    s.run_until(SimTime::seconds(1));
    CHECK(first == SimTime::millis(15));
    CHECK(second_start == SimTime::millis(15));
}

TEST_CASE("node host buffers deliveries and timers across a pause")
{
    sim::Simulator s;
    sim::Network net(s, sim::NetworkModel::from_rtt(SimTime::micros(48)));
    const auto src = net.add_node();
    NodeHost host(net, small_heap(), 2);
    std::vector<std::pair<int, SimTime>> log;
    s.schedule(SimTime::millis(1), host.id(), "gc", [&] { host.runtime().collect_now(); });
    s.schedule(SimTime::millis(2), src, "send",
               [&]
               {
                   net.send(src, host.id(), "m1", [&] { log.emplace_back(1, s.now()); });
                   net.send(src, host.id(), "m2", [&] { log.emplace_back(2, s.now()); });
               });
    s.schedule(SimTime::millis(3), host.id(), "arm", [&] { host.after(SimTime::millis(1), "t", [&] { log.emplace_back(3, s.now()); }); });
    s.run_until(SimTime::seconds(1));
    const SimTime wake = host.runtime().pauses().front().end;
    REQUIRE(log.size() == 3);
    CHECK(log[0] == std::make_pair(1, wake));
    CHECK(log[1] == std::make_pair(2, wake));
    CHECK(log[2] == std::make_pair(3, wake));
    CHECK(host.buffered() == 0);
}
