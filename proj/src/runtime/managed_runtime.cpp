#include "blade/runtime/managed_runtime.hpp"

#include <stdexcept>
#include <string>
#include <utility>

namespace blade::runtime
{
    std::string_view to_string(TicketState s) noexcept
    {
        switch (s)
        {
        case TicketState::Offered:
            return "offered";
        case TicketState::Deferred:
            return "deferred";
        case TicketState::Running:
            return "running";
        case TicketState::Completed:
            return "completed";
        case TicketState::ForcedCompleted:
            return "forced-completed";
        }
        return "?";
    }

    HeapModel RuntimeConfig::initial_heap() const
    {
        HeapModel h;
        h.live_bytes = live_bytes;
        h.allocated_bytes = live_bytes;
        h.trigger_bytes = trigger_bytes.value_or(2 * live_bytes);
        h.hard_limit_bytes = hard_limit_bytes;
        h.low_water_bytes = low_water_bytes.value_or(hard_limit_bytes / 5);
        return h;
    }

    ManagedRuntime::ManagedRuntime(sim::Simulator &sim, NodeId node, RuntimeConfig config)
        : m_sim(sim), m_node(node), m_config(std::move(config)), m_heap(m_config.initial_heap()),
          m_estimator(m_config.default_pause)
    {
        m_heap.validate();
    }

    void ManagedRuntime::reg_gc_hand(GcHandler handler)
    {
        m_handler = std::move(handler);
    }

    std::optional<CollectionTicket> ManagedRuntime::ticket(std::uint64_t id) const
    {
        if (id == 0 || id > m_tickets.size())
        {
            return std::nullopt;
        }
        return m_tickets[id - 1];
    }

    std::uint64_t ManagedRuntime::new_ticket(TicketState state)
    {
        CollectionTicket t;
        t.id = m_tickets.size() + 1;
        t.allocated = m_heap.allocated_bytes;
        t.estimated_pause = m_estimator.estimate(m_heap.live_bytes);
        t.state = state;
        m_tickets.push_back(t);
        return t.id;
    }

    void ManagedRuntime::allocate(Bytes n)
    {
        if (n == 0)
        {
            return;
        }
        if (!m_config.collection_enabled)
        {
            m_heap.allocated_bytes += n;
            return;
        }
        if (m_heap.live_bytes + n > m_heap.hard_limit_bytes)
        {
            throw std::length_error("ManagedRuntime::allocate: request of " + std::to_string(n) +
                                    " bytes cannot fit under the hard limit");
        }
        if (m_heap.allocated_bytes + n > m_heap.hard_limit_bytes && !m_paused)
        {
            // Exhaustion: run the collector now, whatever the application decided.
            if (m_active != 0 && ticket_ref(m_active).state == TicketState::Deferred)
            {
                ticket_ref(m_active).state = TicketState::ForcedCompleted;
                begin_pause(m_active, true, {});
            }
            else if (m_active == 0)
            {
                m_active = new_ticket(TicketState::ForcedCompleted);
                begin_pause(m_active, true, {});
            }
        }
        m_heap.allocated_bytes += n;
        if (m_active == 0 && m_heap.allocated_bytes >= m_heap.trigger_bytes)
        {
            offer();
        }
    }

    void ManagedRuntime::offer()
    {
        m_active = new_ticket(TicketState::Offered);
        ++m_upcalls;
        const auto id = m_active;
        const bool now = !m_handler || m_handler(ticket_ref(id));
        if (now)
        {
            ticket_ref(id).state = TicketState::Running;
            begin_pause(id, false, {});
        }
        else
        {
            ticket_ref(id).state = TicketState::Deferred;
        }
    }

    void ManagedRuntime::start_gc(std::uint64_t id, Action on_finished)
    {
        if (id == 0 || id > m_tickets.size() || ticket_ref(id).state != TicketState::Deferred || m_paused)
        {
            if (on_finished)
            {
                on_finished();
            }
            return;
        }
        ticket_ref(id).state = TicketState::Running;
        begin_pause(id, false, std::move(on_finished));
    }

    void ManagedRuntime::collect_now()
    {
        if (!m_config.collection_enabled || m_paused)
        {
            return;
        }
        if (m_active != 0 && ticket_ref(m_active).state == TicketState::Deferred)
        {
            ticket_ref(m_active).state = TicketState::ForcedCompleted;
            begin_pause(m_active, true, {});
            return;
        }
        if (m_active == 0)
        {
            m_active = new_ticket(TicketState::Running);
            begin_pause(m_active, false, {});
        }
    }

    void ManagedRuntime::begin_pause(std::uint64_t id, bool forced, Action on_finished)
    {
        const SimTime pause = m_config.cost.pause(m_heap.live_bytes);
        const SimTime start = m_sim.now();
        m_heap.allocated_bytes = m_heap.live_bytes;
        m_paused = true;
        m_pauses.push_back({id, start, start + pause, forced});
        if (m_hooks.on_begin)
        {
            m_hooks.on_begin();
        }
        m_sim.schedule(start + pause, m_node, "gc-end",
                       [this, id, pause, done = std::move(on_finished)]() mutable
                       { end_pause(id, pause, std::move(done)); });
    }

    void ManagedRuntime::end_pause(std::uint64_t id, SimTime pause, Action on_finished)
    {
        m_paused = false;
        auto &t = ticket_ref(id);
        if (t.state == TicketState::Running)
        {
            t.state = TicketState::Completed;
        }
        m_estimator.record(m_heap.live_bytes, pause);
        if (m_active == id)
        {
            m_active = 0;
        }
        if (on_finished)
        {
            on_finished();
        }
        if (m_hooks.on_end)
        {
            m_hooks.on_end();
        }
    }
}
