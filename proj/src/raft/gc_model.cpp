#include "blade/raft/gc_model.hpp"

#include <stdexcept>

namespace blade::raft
{
    namespace
    {
        void require_non_negative(SimTime t, const char *what)
        {
            if (t < sim::kZeroTime)
            {
                throw std::invalid_argument(std::string("raft model: negative ") + what);
            }
        }
    }

    RaftModelResult raft_follower_model(SimTime t_schedule, SimTime t_gc)
    {
        require_non_negative(t_schedule, "t_schedule");
        require_non_negative(t_gc, "t_gc");
        return {sim::kZeroTime, 0, t_schedule + t_gc};
    }

    RaftModelResult raft_leader_model(const LeaderModel &m)
    {
        require_non_negative(m.t_fastelect, "t_fastelect");
        require_non_negative(m.t_proxy, "t_proxy");
        require_non_negative(m.t_gc, "t_gc");
        const SimTime impact = m.t_fastelect + m.t_proxy;
        return {impact, 0, impact + m.t_gc};
    }
}
