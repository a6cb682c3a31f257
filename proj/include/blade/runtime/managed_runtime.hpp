#pragma once

#include "blade/runtime/heap_model.hpp"
#include "blade/runtime/pause_estimator.hpp"
#include "blade/sim/simulator.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string_view>
#include <vector>

namespace blade::runtime
{
    using sim::Action;
    using sim::NodeId;

    enum class TicketState
    {
        Offered,
        Deferred,
        Running,
        Completed,
        ForcedCompleted,
    };

    std::string_view to_string(TicketState s) noexcept;

    /// One collection event as seen by the application.
    struct CollectionTicket
    {
        std::uint64_t id = 0;
        Bytes allocated = 0;
        SimTime estimated_pause;
        TicketState state = TicketState::Offered;
    };

    /// Upcall target. Return true to collect now, false to defer until start_gc(id).
    using GcHandler = std::function<bool(const CollectionTicket &)>;

    struct RuntimeConfig
    {
        Bytes live_bytes = 150 * sim::kMiB;
        /// Occupancy that starts a collection cycle; unset means twice the live set.
        std::optional<Bytes> trigger_bytes;
        Bytes hard_limit_bytes = sim::kGiB;
        /// Headroom kept free for deferral; unset means 20% of the hard limit.
        std::optional<Bytes> low_water_bytes;
        CollectorCostModel cost;
        SimTime default_pause = SimTime::millis(10);
        /// False models a disabled collector: memory is never reclaimed and the
        /// hard limit is not enforced.
        bool collection_enabled = true;

        HeapModel initial_heap() const;
    };

    struct PauseRecord
    {
        std::uint64_t ticket_id = 0;
        SimTime start;
        SimTime end;
        bool forced = false;
    };

    /// Mock runtime of one node: heap growth, a stop-the-world collector, and the
    /// collection-scheduling API (handler registration, upcall, start).
    class ManagedRuntime
    {
    public:
        struct PauseHooks
        {
            Action on_begin;
            Action on_end;
        };

        ManagedRuntime(sim::Simulator &sim, NodeId node, RuntimeConfig config);

        ManagedRuntime(const ManagedRuntime &) = delete;
        ManagedRuntime &operator=(const ManagedRuntime &) = delete;

        /// Replaces any previous handler; an empty handler restores collect-immediately.
        void reg_gc_hand(GcHandler handler);
        bool has_handler() const noexcept { return static_cast<bool>(m_handler); }

        void allocate(Bytes n);

        /// Starts deferred collection `id`. Safe to call at any time: unknown,
        /// running or finished ids are ignored and on_finished runs immediately.
        /// Otherwise on_finished runs when the pause ends.
        void start_gc(std::uint64_t id, Action on_finished = {});

        /// Collects immediately without an upcall, consuming any deferred ticket.
        void collect_now();

        void set_pause_hooks(PauseHooks hooks) { m_hooks = std::move(hooks); }

        bool paused() const noexcept { return m_paused; }
        NodeId node() const noexcept { return m_node; }
        const HeapModel &heap() const noexcept { return m_heap; }
        const PauseEstimator &estimator() const noexcept { return m_estimator; }
        const RuntimeConfig &config() const noexcept { return m_config; }
        const std::vector<PauseRecord> &pauses() const noexcept { return m_pauses; }
        std::optional<CollectionTicket> ticket(std::uint64_t id) const;
        std::uint64_t last_ticket_id() const noexcept { return m_tickets.size(); }
        std::uint64_t upcalls() const noexcept { return m_upcalls; }

    private:
        CollectionTicket &ticket_ref(std::uint64_t id) { return m_tickets[id - 1]; }
        void offer();
        void begin_pause(std::uint64_t id, bool forced, Action on_finished);
        void end_pause(std::uint64_t id, SimTime pause, Action on_finished);
        std::uint64_t new_ticket(TicketState state);

        sim::Simulator &m_sim;
        NodeId m_node;
        RuntimeConfig m_config;
        HeapModel m_heap;
        PauseEstimator m_estimator;
        GcHandler m_handler;
        PauseHooks m_hooks;
        std::vector<CollectionTicket> m_tickets;
        std::vector<PauseRecord> m_pauses;
        std::uint64_t m_active = 0;
        std::uint64_t m_upcalls = 0;
        bool m_paused = false;
    };
}
