#include "blade/sim/simulator.hpp"

#include <stdexcept>
#include <utility>

namespace blade::sim
{
    bool Event::operator==(const Event &o) const noexcept
    {
        return fire_at == o.fire_at && seq == o.seq && target == o.target && std::string_view(label) == o.label;
    }

    Simulator::Simulator(std::uint64_t seed) : m_seed(seed), m_rng(seed) {}

    std::uint32_t Simulator::acquire_slot()
    {
        if (!m_free.empty())
        {
            auto slot = m_free.back();
            m_free.pop_back();
            return slot;
        }
        m_slots.emplace_back();
        return static_cast<std::uint32_t>(m_slots.size() - 1);
    }

    EventHandle Simulator::schedule(SimTime fire_at, NodeId target, const char *label, Action action)
    {
        if (fire_at < m_now)
        {
            throw std::invalid_argument("Simulator::schedule: event at " + fire_at.to_string() +
                                        " precedes clock " + m_now.to_string());
        }
        const auto seq = m_next_seq++;
        const auto slot = acquire_slot();
        auto &s = m_slots[slot];
        s.seq = seq;
        s.target = target;
        s.label = label;
        s.action = std::move(action);
        s.live = true;
        ++m_live;
        m_queue.push(Entry{fire_at, seq, slot});
        return EventHandle{seq, slot};
    }

    EventHandle Simulator::schedule_after(SimTime delay, NodeId target, const char *label, Action action)
    {
        return schedule(m_now + delay, target, label, std::move(action));
    }

    bool Simulator::pending(EventHandle handle) const noexcept
    {
        if (!handle.valid() || handle.m_slot >= m_slots.size())
        {
            return false;
        }
        const auto &s = m_slots[handle.m_slot];
        return s.live && s.seq == handle.m_seq;
    }

    bool Simulator::cancel(EventHandle handle)
    {
        if (!pending(handle))
        {
            return false;
        }
        auto &s = m_slots[handle.m_slot];
        s.live = false;
        s.action = nullptr;
        --m_live;
        return true;
    }

    SimStats Simulator::run_until(SimTime deadline)
    {
        SimStats stats;
        while (!m_queue.empty() && m_queue.top().fire_at <= deadline)
        {
            const Entry e = m_queue.top();
            m_queue.pop();
            auto &s = m_slots[e.slot];
            if (!s.live || s.seq != e.seq)
            {
                // cancelled; the slot is only recycled once its queue entry is gone
                m_free.push_back(e.slot);
                continue;
            }
            m_now = e.fire_at;
            Action action = std::move(s.action);
            const Event fired{e.fire_at, e.seq, s.target, s.label};
            s.live = false;
            s.action = nullptr;
            --m_live;
            m_free.push_back(e.slot);
            if (m_tracing)
            {
                m_trace.push_back(fired);
            }
            ++m_fired;
            ++stats.events_fired;
            action();
        }
        if (deadline > m_now)
        {
            m_now = deadline;
        }
        stats.clock = m_now;
        return stats;
    }
}
