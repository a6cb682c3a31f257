#pragma once

#include "blade/metrics/latency.hpp"

#include <span>

namespace blade::metrics
{
    struct OverlapStat
    {
        std::size_t total_collections = 0;
        std::size_t overlapping_collections = 0;

        double fraction() const noexcept
        {
            return total_collections == 0 ? 0.0
                                           : static_cast<double>(overlapping_collections) /
                                                 static_cast<double>(total_collections);
        }
    };

    /// A collection overlaps when its interval intersects a collection interval on
    /// any other node. Intervals are half-open. Throws on start > end.
    OverlapStat overlap_count(std::span<const PauseInterval> intervals);
}
