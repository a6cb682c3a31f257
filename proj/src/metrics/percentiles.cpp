#include "blade/metrics/percentiles.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace blade::metrics
{
    SimTime nearest_rank(std::span<const SimTime> sorted, double percent)
    {
        if (sorted.empty())
        {
            throw std::invalid_argument("nearest_rank: empty sample set");
        }
        const double n = static_cast<double>(sorted.size());
        // Rounding guards ceil() against values like 99.9/100*1000 = 999.0000000000001.
        const double exact = percent / 100.0 * n;
        auto rank = static_cast<std::size_t>(std::ceil(exact - 1e-9 * std::max(1.0, exact)));
        rank = std::clamp<std::size_t>(rank, 1, sorted.size());
        return sorted[rank - 1];
    }

    std::vector<SimTime> latencies_of(std::span<const LatencySample> samples)
    {
        std::vector<SimTime> out;
        out.reserve(samples.size());
        for (const auto &s : samples)
        {
            out.push_back(s.latency());
        }
        return out;
    }

    PercentileReport percentiles(std::span<const SimTime> latencies)
    {
        if (latencies.empty())
        {
            throw std::invalid_argument("percentiles: empty sample set");
        }
        std::vector<SimTime> sorted(latencies.begin(), latencies.end());
        std::sort(sorted.begin(), sorted.end());

        PercentileReport r;
        r.count = sorted.size();
        long double sum = 0.0L;
        for (auto t : sorted)
        {
            sum += t.count();
        }
        const long double mean = sum / sorted.size();
        long double sq = 0.0L;
        for (auto t : sorted)
        {
            const long double d = t.count() - mean;
            sq += d * d;
        }
        r.mean_us = static_cast<double>(mean);
        r.stddev_us = static_cast<double>(std::sqrt(sq / sorted.size()));
        r.median = nearest_rank(sorted, 50.0);
        r.max = sorted.back();
        for (std::size_t i = 0; i < kQuantileLevels.size(); ++i)
        {
            r.quantiles[i] = nearest_rank(sorted, kQuantileLevels[i]);
        }
        return r;
    }

    PercentileReport percentiles(std::span<const LatencySample> samples)
    {
        const auto l = latencies_of(samples);
        return percentiles(std::span<const SimTime>(l));
    }
}
