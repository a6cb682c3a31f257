#include "blade/runtime/processor.hpp"

#include <stdexcept>
#include <utility>

namespace blade::runtime
{
    Processor::Processor(sim::Simulator &sim, NodeId node, std::size_t parallelism)
        : m_sim(sim), m_node(node), m_parallelism(parallelism)
    {
        if (parallelism == 0)
        {
            throw std::invalid_argument("Processor: parallelism must be positive");
        }
    }

    void Processor::submit(SimTime service, Action on_start, Action on_done)
    {
        m_waiting.push_back({service, std::move(on_start), std::move(on_done)});
        start_waiting();
    }

    void Processor::start_waiting()
    {
        if (m_starting)
        {
            return;
        }
        m_starting = true;
        while (!m_frozen && !m_waiting.empty() && m_running.size() < m_parallelism)
        {
            Pending p = std::move(m_waiting.front());
            m_waiting.pop_front();
            const auto job = m_next_job++;
            auto &r = m_running[job];
            r.finish_at = m_sim.now() + p.service;
            r.remaining = p.service;
            r.on_done = std::move(p.on_done);
            arm(job);
            if (p.on_start)
            {
                p.on_start();
            }
        }
        m_starting = false;
    }

    void Processor::arm(std::uint64_t job)
    {
        auto &r = m_running.at(job);
        r.completion = m_sim.schedule(r.finish_at, m_node, "job-done", [this, job] { complete(job); });
    }

    void Processor::complete(std::uint64_t job)
    {
        auto it = m_running.find(job);
        Action done = std::move(it->second.on_done);
        m_running.erase(it);
        if (done)
        {
            done();
        }
        start_waiting();
    }

    void Processor::freeze()
    {
        if (m_frozen)
        {
            return;
        }
        m_frozen = true;
        for (auto &[job, r] : m_running)
        {
            m_sim.cancel(r.completion);
            r.remaining = r.finish_at - m_sim.now();
        }
    }

    void Processor::thaw()
    {
        if (!m_frozen)
        {
            return;
        }
        m_frozen = false;
        for (auto &[job, r] : m_running)
        {
            r.finish_at = m_sim.now() + r.remaining;
            arm(job);
        }
        start_waiting();
    }
}
