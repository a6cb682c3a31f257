#include "blade/runtime/heap_model.hpp"

#include <cmath>
#include <stdexcept>

namespace blade::runtime
{
    double CollectorCostModel::pause_micros(Bytes live) const noexcept
    {
        const double gib = static_cast<double>(live) / static_cast<double>(sim::kGiB);
        return static_cast<double>(fixed_overhead.count()) + static_cast<double>(pause_per_gb.count()) * gib;
    }

    SimTime CollectorCostModel::pause(Bytes live) const noexcept
    {
        return SimTime::micros(std::llround(pause_micros(live)));
    }

    void HeapModel::validate() const
    {
        if (live_bytes > allocated_bytes)
        {
            throw std::invalid_argument("heap: live_bytes exceeds allocated_bytes");
        }
        if (allocated_bytes > hard_limit_bytes)
        {
            throw std::invalid_argument("heap: allocated_bytes exceeds hard_limit_bytes");
        }
        if (live_bytes >= trigger_bytes)
        {
            throw std::invalid_argument("heap: trigger_bytes must exceed live_bytes");
        }
        if (trigger_bytes + low_water_bytes > hard_limit_bytes)
        {
            throw std::invalid_argument("heap: trigger_bytes + low_water_bytes exceeds hard_limit_bytes");
        }
    }
}
