#pragma once

#include "blade/sim/sim_time.hpp"

#include <cstdint>
#include <functional>
#include <queue>
#include <random>
#include <vector>

namespace blade::sim
{
    using Action = std::function<void()>;

    /// Record of a fired event. (fire_at, seq) is a strict total order over every
    /// event a simulator ever schedules.
    struct Event
    {
        SimTime fire_at;
        std::uint64_t seq = 0;
        NodeId target;
        const char *label = "";

        bool operator==(const Event &o) const noexcept;
    };

    class EventHandle
    {
    public:
        EventHandle() = default;

        bool valid() const noexcept { return m_seq != 0; }
        std::uint64_t seq() const noexcept { return m_seq; }

    private:
        friend class Simulator;
        EventHandle(std::uint64_t seq, std::uint32_t slot) : m_seq(seq), m_slot(slot) {}

        std::uint64_t m_seq = 0;
        std::uint32_t m_slot = 0;
    };

    struct SimStats
    {
        std::uint64_t events_fired = 0;
        SimTime clock;
    };

    /// Single-threaded discrete-event engine. Events at equal times fire in
    /// insertion order; sequence numbers start at 1.
    class Simulator
    {
    public:
        explicit Simulator(std::uint64_t seed = 1);

        Simulator(const Simulator &) = delete;
        Simulator &operator=(const Simulator &) = delete;

        SimTime now() const noexcept { return m_now; }

        /// Throws std::invalid_argument if fire_at precedes the current clock.
        EventHandle schedule(SimTime fire_at, NodeId target, const char *label, Action action);
        EventHandle schedule_after(SimTime delay, NodeId target, const char *label, Action action);

        /// Returns true if the event was still pending.
        bool cancel(EventHandle handle);
        bool pending(EventHandle handle) const noexcept;

        /// Fires every event with fire_at <= deadline, then parks the clock at deadline.
        SimStats run_until(SimTime deadline);

        std::size_t queued() const noexcept { return m_live; }
        std::uint64_t events_fired() const noexcept { return m_fired; }

        std::mt19937_64 &rng() noexcept { return m_rng; }
        std::uint64_t seed() const noexcept { return m_seed; }

        void enable_trace(bool on) { m_tracing = on; }
        const std::vector<Event> &trace() const noexcept { return m_trace; }

    private:
        struct Slot
        {
            std::uint64_t seq = 0;
            NodeId target;
            const char *label = "";
            Action action;
            bool live = false;
        };

        struct Entry
        {
            SimTime fire_at;
            std::uint64_t seq;
            std::uint32_t slot;

            bool operator>(const Entry &o) const noexcept
            {
                return fire_at != o.fire_at ? fire_at > o.fire_at : seq > o.seq;
            }
        };

        std::uint32_t acquire_slot();

        SimTime m_now;
        std::uint64_t m_next_seq = 1;
        std::uint64_t m_fired = 0;
        std::size_t m_live = 0;
        std::priority_queue<Entry, std::vector<Entry>, std::greater<>> m_queue;
        std::vector<Slot> m_slots;
        std::vector<std::uint32_t> m_free;
        std::uint64_t m_seed;
        std::mt19937_64 m_rng;
        bool m_tracing = false;
        std::vector<Event> m_trace;
    };
}
