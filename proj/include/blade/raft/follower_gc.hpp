#pragma once

#include <cstdint>

namespace blade::raft
{
    /// Server-side half of collection scheduling: remembers the outstanding ask so
    /// it can be repeated to a new leader.
    class FollowerGc
    {
    public:
        /// Records the ask; the caller then sends it to the leader.
        void on_gc_request(std::uint64_t id) noexcept { m_req_in_flight = id; }

        /// Returns the id to start; the caller reports completion to the leader.
        std::uint64_t on_gc_allowed(std::uint64_t id) noexcept
        {
            m_req_in_flight = 0;
            return id;
        }

        /// True when an ask must be repeated to the new leader.
        bool on_leader_change() const noexcept { return m_req_in_flight != 0; }

        std::uint64_t req_in_flight() const noexcept { return m_req_in_flight; }

    private:
        std::uint64_t m_req_in_flight = 0;
    };
}
