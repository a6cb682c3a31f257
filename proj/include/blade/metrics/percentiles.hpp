#pragma once

#include "blade/metrics/latency.hpp"

#include <array>
#include <span>
#include <vector>

namespace blade::metrics
{
    /// Quantile levels reported alongside the moments, in percent.
    inline constexpr std::array<double, 6> kQuantileLevels{95.0, 99.0, 99.9, 99.99, 99.999, 99.9999};

    struct PercentileReport
    {
        std::size_t count = 0;
        double mean_us = 0.0;
        double stddev_us = 0.0;
        SimTime median;
        SimTime max;
        std::array<SimTime, kQuantileLevels.size()> quantiles{};
    };

    /// Nearest-rank quantile of an ascending list: the element at rank ceil(p/100 * n).
    SimTime nearest_rank(std::span<const SimTime> sorted, double percent);

    /// Population mean and standard deviation; quantiles by nearest rank.
    /// Throws std::invalid_argument for an empty input.
    PercentileReport percentiles(std::span<const SimTime> latencies);
    PercentileReport percentiles(std::span<const LatencySample> samples);

    std::vector<SimTime> latencies_of(std::span<const LatencySample> samples);
}
