#include "blade/runtime/node_host.hpp"

#include <utility>

namespace blade::runtime
{
    NodeHost::NodeHost(sim::Network &net, RuntimeConfig config, std::size_t parallelism)
        : m_net(net), m_sim(net.simulator()), m_id(net.add_node()), m_runtime(m_sim, m_id, std::move(config)),
          m_processor(m_sim, m_id, parallelism)
    {
        m_net.set_gate(m_id, [this](Action a) { deliver(std::move(a)); });
        m_runtime.set_pause_hooks({[this]
                                   {
                                       m_processor.freeze();
                                       if (m_listener)
                                       {
                                           m_listener(true);
                                       }
                                   },
                                   [this] { on_pause_end(); }});
    }

    void NodeHost::deliver(Action action)
    {
        if (m_runtime.paused() || !m_inbox.empty())
        {
            m_inbox.push_back(std::move(action));
            return;
        }
        action();
    }

    sim::EventHandle NodeHost::after(SimTime delay, const char *label, Action action)
    {
        return m_sim.schedule_after(delay, m_id, label, [this, a = std::move(action)]() mutable { deliver(std::move(a)); });
    }

    void NodeHost::on_pause_end()
    {
        m_processor.thaw();
        if (m_listener)
        {
            m_listener(false);
        }
        if (m_flushing)
        {
            return;
        }
        m_flushing = true;
        while (!m_runtime.paused() && !m_inbox.empty())
        {
            Action a = std::move(m_inbox.front());
            m_inbox.pop_front();
            a();
        }
        m_flushing = false;
    }

    void NodeHost::start_background_allocation(Bytes bytes_per_second, SimTime tick)
    {
        if (bytes_per_second == 0 || tick <= sim::kZeroTime)
        {
            return;
        }
        const Bytes slice = bytes_per_second * static_cast<Bytes>(tick.count()) / 1'000'000;
        after(tick, "bg-alloc", [this, slice, tick] { background_tick(slice, tick); });
    }

    void NodeHost::background_tick(Bytes slice, SimTime tick)
    {
        m_runtime.allocate(slice);
        after(tick, "bg-alloc", [this, slice, tick] { background_tick(slice, tick); });
    }
}
