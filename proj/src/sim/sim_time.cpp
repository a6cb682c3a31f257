#include "blade/sim/sim_time.hpp"

#include <cmath>
#include <cstdio>

namespace blade::sim
{
    SimTime SimTime::from_millis(double ms) noexcept
    {
        return SimTime{static_cast<std::int64_t>(std::llround(ms * 1000.0))};
    }

    std::string SimTime::to_string() const
    {
        char buf[48];
        std::snprintf(buf, sizeof buf, "%.3fms", as_millis());
        return buf;
    }
}
