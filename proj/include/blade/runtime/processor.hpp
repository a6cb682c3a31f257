#pragma once

#include "blade/sim/simulator.hpp"

#include <cstdint>
#include <deque>
#include <map>

namespace blade::runtime
{
    using sim::Action;
    using sim::NodeId;
    using sim::SimTime;

    /// FIFO work queue with a fixed number of execution slots. While frozen no
    /// job starts and in-service jobs keep their remaining service time.
    class Processor
    {
    public:
        Processor(sim::Simulator &sim, NodeId node, std::size_t parallelism);

        Processor(const Processor &) = delete;
        Processor &operator=(const Processor &) = delete;

        /// on_start runs when the job takes a slot (it may freeze the processor).
        void submit(SimTime service, Action on_start, Action on_done);

        void freeze();
        void thaw();

        bool frozen() const noexcept { return m_frozen; }
        bool idle() const noexcept { return m_running.empty() && m_waiting.empty(); }
        std::size_t in_service() const noexcept { return m_running.size(); }
        std::size_t waiting() const noexcept { return m_waiting.size(); }
        std::size_t parallelism() const noexcept { return m_parallelism; }

    private:
        struct Pending
        {
            SimTime service;
            Action on_start;
            Action on_done;
        };
        struct Running
        {
            SimTime finish_at;
            SimTime remaining;
            sim::EventHandle completion;
            Action on_done;
        };

        void start_waiting();
        void arm(std::uint64_t job);
        void complete(std::uint64_t job);

        sim::Simulator &m_sim;
        NodeId m_node;
        std::size_t m_parallelism;
        std::deque<Pending> m_waiting;
        std::map<std::uint64_t, Running> m_running;
        std::uint64_t m_next_job = 1;
        bool m_frozen = false;
        bool m_starting = false;
    };
}
