#pragma once

#include "blade/sim/sim_time.hpp"

#include <cstdint>

namespace blade::raft
{
    using sim::SimTime;

    struct RaftModelResult
    {
        SimTime latency_impact;
        std::uint32_t capacity_loss_servers = 0;
        SimTime event_time;
    };

    /// Leader collection: hand-off broadcast, then proxying of queued requests.
    struct LeaderModel
    {
        SimTime t_fastelect;
        SimTime t_proxy;
        SimTime t_gc;

        /// Half an RTT for each of the hand-off and the proxy hop.
        static LeaderModel for_rtt(SimTime rtt, SimTime t_gc) { return {rtt / 2, rtt - rtt / 2, t_gc}; }
    };

    /// Follower collection costs nothing visible: (0, 0, t_schedule + t_gc).
    RaftModelResult raft_follower_model(SimTime t_schedule, SimTime t_gc);

    /// (t_fastelect + t_proxy, 0, t_fastelect + t_proxy + t_gc).
    RaftModelResult raft_leader_model(const LeaderModel &model);
}
