#pragma once

#include "blade/sim/sim_time.hpp"

#include <deque>
#include <optional>
#include <set>
#include <span>
#include <vector>

namespace blade::http
{
    using sim::NodeId;

    /// Balancer-side admission of backend collections: at most max_concurrent
    /// backends are out of rotation at once, the rest wait in arrival order.
    class Coordinator
    {
    public:
        enum class Decision
        {
            Granted,
            Queued,
            Ignored,
        };

        explicit Coordinator(std::size_t max_concurrent);

        /// Duplicate asks (already collecting or already queued) are ignored.
        Decision decide(NodeId asker);

        /// Releases `node`; returns the queued backend granted in its place, if any.
        std::optional<NodeId> on_done(NodeId node);

        std::size_t max_concurrent() const noexcept { return m_max; }
        const std::set<NodeId> &collecting() const noexcept { return m_collecting; }
        const std::deque<NodeId> &wait_queue() const noexcept { return m_waiting; }

    private:
        std::size_t m_max;
        std::set<NodeId> m_collecting;
        std::deque<NodeId> m_waiting;
    };

    /// Cyclic assignment over the backends currently accepting requests.
    class RoundRobinRouter
    {
    public:
        explicit RoundRobinRouter(std::size_t backends);

        void set_available(std::size_t backend, bool available);
        bool available(std::size_t backend) const { return m_available.at(backend); }

        /// Next available backend after the previous pick; nullopt when none is.
        std::optional<std::size_t> route();

    private:
        std::vector<bool> m_available;
        std::size_t m_cursor = 0;
    };
}
