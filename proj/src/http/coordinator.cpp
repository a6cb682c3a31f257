#include "blade/http/coordinator.hpp"

#include <algorithm>
#include <stdexcept>

namespace blade::http
{
    Coordinator::Coordinator(std::size_t max_concurrent) : m_max(max_concurrent)
    {
        if (max_concurrent == 0)
        {
            throw std::invalid_argument("Coordinator: max_concurrent must be positive");
        }
    }

    Coordinator::Decision Coordinator::decide(NodeId asker)
    {
        if (m_collecting.contains(asker) || std::find(m_waiting.begin(), m_waiting.end(), asker) != m_waiting.end())
        {
            return Decision::Ignored;
        }
        if (m_collecting.size() < m_max)
        {
            m_collecting.insert(asker);
            return Decision::Granted;
        }
        m_waiting.push_back(asker);
        return Decision::Queued;
    }

    std::optional<NodeId> Coordinator::on_done(NodeId node)
    {
        if (m_collecting.erase(node) == 0)
        {
            return std::nullopt;
        }
        if (m_waiting.empty() || m_collecting.size() >= m_max)
        {
            return std::nullopt;
        }
        const NodeId next = m_waiting.front();
        m_waiting.pop_front();
        m_collecting.insert(next);
        return next;
    }

    RoundRobinRouter::RoundRobinRouter(std::size_t backends) : m_available(backends, true)
    {
        if (backends == 0)
        {
            throw std::invalid_argument("RoundRobinRouter: no backends");
        }
    }

    void RoundRobinRouter::set_available(std::size_t backend, bool available)
    {
        m_available.at(backend) = available;
    }

    std::optional<std::size_t> RoundRobinRouter::route()
    {
        const std::size_t n = m_available.size();
        for (std::size_t step = 0; step < n; ++step)
        {
            const std::size_t candidate = (m_cursor + step) % n;
            if (m_available[candidate])
            {
                m_cursor = (candidate + 1) % n;
                return candidate;
            }
        }
        return std::nullopt;
    }
}
