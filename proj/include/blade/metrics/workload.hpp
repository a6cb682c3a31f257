#pragma once

#include "blade/metrics/latency.hpp"

#include <cstdint>
#include <vector>

namespace blade::metrics
{
    enum class ArrivalProcess : std::uint8_t
    {
        Uniform,
        Poisson,
    };

    enum class MixOrder : std::uint8_t
    {
        /// gets then sets, repeating exactly (e.g. G,G,G,S for 3:1)
        Interleaved,
        /// each request independently a set with probability sets/(gets+sets)
        Random,
    };

    struct WorkloadConfig
    {
        double rate_per_second = 100.0;
        SimTime duration = SimTime::seconds(600);
        std::uint32_t gets = 3;
        std::uint32_t sets = 1;
        ArrivalProcess arrivals = ArrivalProcess::Uniform;
        MixOrder order = MixOrder::Interleaved;
        /// Http workloads ignore the get/set mix.
        bool http = false;
        std::uint64_t seed = 1;
    };

    struct Arrival
    {
        std::uint64_t request_id = 0;
        SimTime at;
        RequestKind kind = RequestKind::Http;
    };

    /// Open-loop arrival stream over [0, duration). Throws std::invalid_argument on a
    /// non-positive rate or an empty mix.
    std::vector<Arrival> generate_workload(const WorkloadConfig &config);
}
