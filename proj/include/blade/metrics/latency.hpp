#pragma once

#include "blade/sim/sim_time.hpp"

#include <cstdint>
#include <string_view>

namespace blade::metrics
{
    using sim::NodeId;
    using sim::SimTime;

    enum class RequestKind : std::uint8_t
    {
        Get,
        Set,
        Http,
    };

    std::string_view to_string(RequestKind k) noexcept;

    struct LatencySample
    {
        std::uint64_t request_id = 0;
        SimTime issued_at;
        SimTime completed_at;
        NodeId server;
        RequestKind kind = RequestKind::Http;

        SimTime latency() const noexcept { return completed_at - issued_at; }
    };

    /// A closed [start, end) interval during which a node was stopped.
    struct PauseInterval
    {
        NodeId node;
        SimTime start;
        SimTime end;
    };
}
