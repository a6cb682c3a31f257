#pragma once

#include "blade/sim/sim_time.hpp"

namespace blade::runtime
{
    using sim::Bytes;
    using sim::SimTime;

    /// Stop-the-world pause as a function of the surviving heap:
    /// pause(live) = fixed_overhead + pause_per_gb * live / GiB.
    struct CollectorCostModel
    {
        SimTime pause_per_gb = SimTime::millis(25);
        SimTime fixed_overhead = SimTime::micros(8761);

        double pause_micros(Bytes live) const noexcept;
        SimTime pause(Bytes live) const noexcept;
    };

    struct HeapModel
    {
        Bytes live_bytes = 0;
        Bytes allocated_bytes = 0;
        Bytes trigger_bytes = 0;
        Bytes hard_limit_bytes = 0;
        Bytes low_water_bytes = 0;

        /// Throws std::invalid_argument naming the violated bound.
        void validate() const;
    };
}
