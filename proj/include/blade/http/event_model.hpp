#pragma once

#include "blade/sim/sim_time.hpp"

#include <cstdint>

namespace blade::http
{
    using sim::SimTime;

    /// Phases of one coordinated backend collection: ask and grant, drain of
    /// trailing requests, the pause itself, and the completion notice.
    struct HttpEventModel
    {
        SimTime t_schedule;
        SimTime t_trailers;
        SimTime t_gc;
        SimTime t_rpc;
    };

    struct HttpModelResult
    {
        SimTime latency_impact;
        std::uint32_t capacity_loss_servers = 0;
        SimTime capacity_downtime;
        SimTime event_time;
    };

    /// Requests never wait on the pause; the cost is one server of capacity for
    /// trailers + gc + rpc. Throws std::invalid_argument on negative phases.
    HttpModelResult http_model_eval(const HttpEventModel &model);
}
