#include "blade/runtime/pause_estimator.hpp"

#include <algorithm>
#include <cmath>

namespace blade::runtime
{
    void PauseEstimator::record(Bytes live, SimTime observed)
    {
        m_history.push_back({live, observed});
    }

    SimTime PauseEstimator::estimate(Bytes live) const
    {
        if (m_history.size() < 2)
        {
            return m_default;
        }
        const double n = static_cast<double>(m_history.size());
        double mean_x = 0.0;
        double mean_y = 0.0;
        for (const auto &s : m_history)
        {
            mean_x += static_cast<double>(s.live_bytes);
            mean_y += static_cast<double>(s.observed_pause.count());
        }
        mean_x /= n;
        mean_y /= n;

        double sxx = 0.0;
        double sxy = 0.0;
        for (const auto &s : m_history)
        {
            const double dx = static_cast<double>(s.live_bytes) - mean_x;
            sxx += dx * dx;
            sxy += dx * (static_cast<double>(s.observed_pause.count()) - mean_y);
        }
        double predicted = mean_y;
        if (sxx > 0.0)
        {
            predicted += (sxy / sxx) * (static_cast<double>(live) - mean_x);
        }
        return SimTime::micros(std::llround(std::max(predicted, 0.0)));
    }
}
