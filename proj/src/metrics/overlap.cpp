#include "blade/metrics/overlap.hpp"

#include <algorithm>
#include <stdexcept>
#include <vector>

namespace blade::metrics
{
    namespace
    {
        struct Best
        {
            SimTime end = SimTime::micros(-1);
            std::uint32_t node = UINT32_MAX;
        };

        // Largest two ends seen so far, never from the same node.
        struct TopTwo
        {
            Best first;
            Best second;

            void add(SimTime end, std::uint32_t node)
            {
                if (node == first.node)
                {
                    first.end = std::max(first.end, end);
                }
                else if (end > first.end)
                {
                    second = first;
                    first = {end, node};
                }
                else if (node == second.node || end > second.end)
                {
                    second.end = node == second.node ? std::max(second.end, end) : end;
                    second.node = node;
                }
            }

            SimTime excluding(std::uint32_t node) const { return first.node != node ? first.end : second.end; }
        };
    }

    OverlapStat overlap_count(std::span<const PauseInterval> intervals)
    {
        OverlapStat stat;
        stat.total_collections = intervals.size();

        std::vector<PauseInterval> sorted;
        sorted.reserve(intervals.size());
        for (const auto &iv : intervals)
        {
            if (iv.start > iv.end)
            {
                throw std::invalid_argument("overlap_count: interval starts after it ends");
            }
            if (iv.start < iv.end)
            {
                sorted.push_back(iv);
            }
        }
        std::sort(sorted.begin(), sorted.end(), [](const auto &a, const auto &b) { return a.start < b.start; });

        std::vector<TopTwo> prefix(sorted.size());
        TopTwo acc;
        for (std::size_t i = 0; i < sorted.size(); ++i)
        {
            acc.add(sorted[i].end, sorted[i].node.value);
            prefix[i] = acc;
        }

        for (const auto &iv : sorted)
        {
            // Candidates are the intervals starting before this one ends.
            const auto k = std::lower_bound(sorted.begin(), sorted.end(), iv.end,
                                            [](const PauseInterval &p, SimTime t) { return p.start < t; }) -
                           sorted.begin();
            if (k == 0)
            {
                continue;
            }
            if (prefix[k - 1].excluding(iv.node.value) > iv.start)
            {
                ++stat.overlapping_collections;
            }
        }
        return stat;
    }
}
