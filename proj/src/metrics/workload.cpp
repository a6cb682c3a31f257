#include "blade/metrics/workload.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace blade::metrics
{
    std::string_view to_string(RequestKind k) noexcept
    {
        switch (k)
        {
        case RequestKind::Get:
            return "get";
        case RequestKind::Set:
            return "set";
        case RequestKind::Http:
            return "http";
        }
        return "?";
    }

    std::vector<Arrival> generate_workload(const WorkloadConfig &config)
    {
        if (!(config.rate_per_second > 0.0) || !std::isfinite(config.rate_per_second))
        {
            throw std::invalid_argument("workload: rate must be positive");
        }
        if (!config.http && config.gets + config.sets == 0)
        {
            throw std::invalid_argument("workload: get/set mix is empty");
        }

        std::mt19937_64 rng(config.seed);
        std::exponential_distribution<double> gap(config.rate_per_second / 1e6);
        const std::uint32_t window = config.gets + config.sets;
        std::bernoulli_distribution is_set(window == 0 ? 0.0 : static_cast<double>(config.sets) / window);

        std::vector<Arrival> out;
        out.reserve(static_cast<std::size_t>(config.rate_per_second * config.duration.count() / 1e6) + 1);
        double clock_us = 0.0;
        for (std::uint64_t i = 0;; ++i)
        {
            SimTime at;
            if (config.arrivals == ArrivalProcess::Uniform)
            {
                at = SimTime::micros(std::llround(static_cast<double>(i) * 1e6 / config.rate_per_second));
            }
            else
            {
                if (i > 0)
                {
                    clock_us += gap(rng);
                }
                at = SimTime::micros(std::llround(clock_us));
            }
            if (at >= config.duration)
            {
                break;
            }
            RequestKind kind = RequestKind::Http;
            if (!config.http)
            {
                if (config.order == MixOrder::Interleaved)
                {
                    kind = (i % window) < config.gets ? RequestKind::Get : RequestKind::Set;
                }
                else
                {
                    kind = is_set(rng) ? RequestKind::Set : RequestKind::Get;
                }
            }
            out.push_back({i + 1, at, kind});
        }
        return out;
    }
}
