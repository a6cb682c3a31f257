#pragma once

#include "blade/sim/sim_time.hpp"

#include <vector>

namespace blade::runtime
{
    using sim::Bytes;
    using sim::SimTime;

    struct PauseSample
    {
        Bytes live_bytes = 0;
        SimTime observed_pause;
    };

    /// Predicts the next pause by fitting a least-squares line through earlier
    /// (heap size, pause) observations.
    class PauseEstimator
    {
    public:
        explicit PauseEstimator(SimTime default_pause = SimTime::millis(10)) : m_default(default_pause) {}

        void record(Bytes live, SimTime observed);

        /// Fewer than two samples: the default. All samples at one heap size: their mean.
        /// Otherwise the fitted line at `live`, clamped at zero.
        SimTime estimate(Bytes live) const;

        const std::vector<PauseSample> &history() const noexcept { return m_history; }
        SimTime default_pause() const noexcept { return m_default; }

    private:
        std::vector<PauseSample> m_history;
        SimTime m_default;
    };
}
