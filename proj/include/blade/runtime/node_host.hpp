#pragma once

#include "blade/runtime/managed_runtime.hpp"
#include "blade/runtime/processor.hpp"
#include "blade/sim/network.hpp"

#include <deque>
#include <functional>

namespace blade::runtime
{
    /// A simulated process: managed runtime, request processor and an inbox gate.
    /// While the collector runs, deliveries and timers are buffered and replayed in
    /// arrival order when the pause ends; in-service jobs are stretched by the pause.
    class NodeHost
    {
    public:
        NodeHost(sim::Network &net, RuntimeConfig config, std::size_t parallelism);

        NodeHost(const NodeHost &) = delete;
        NodeHost &operator=(const NodeHost &) = delete;

        NodeId id() const noexcept { return m_id; }
        sim::Simulator &sim() noexcept { return m_sim; }
        sim::Network &network() noexcept { return m_net; }
        ManagedRuntime &runtime() noexcept { return m_runtime; }
        const ManagedRuntime &runtime() const noexcept { return m_runtime; }
        Processor &processor() noexcept { return m_processor; }
        bool paused() const noexcept { return m_runtime.paused(); }

        void deliver(Action action);

        /// Timer whose callback is subject to the same stop-the-world gate.
        sim::EventHandle after(SimTime delay, const char *label, Action action);

        /// Allocates bytes_per_second in `tick`-sized slices for the rest of the run.
        void start_background_allocation(Bytes bytes_per_second, SimTime tick);

        std::size_t buffered() const noexcept { return m_inbox.size(); }

        /// Called with true when a pause begins and false when it ends.
        void set_pause_listener(std::function<void(bool)> listener) { m_listener = std::move(listener); }

    private:
        void on_pause_end();
        void background_tick(Bytes slice, SimTime tick);

        sim::Network &m_net;
        sim::Simulator &m_sim;
        NodeId m_id;
        ManagedRuntime m_runtime;
        Processor m_processor;
        std::deque<Action> m_inbox;
        std::function<void(bool)> m_listener;
        bool m_flushing = false;
    };
}
