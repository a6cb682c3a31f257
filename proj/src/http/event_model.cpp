#include "blade/http/event_model.hpp"

#include <stdexcept>

namespace blade::http
{
    HttpModelResult http_model_eval(const HttpEventModel &m)
    {
        if (m.t_schedule < sim::kZeroTime || m.t_trailers < sim::kZeroTime || m.t_gc < sim::kZeroTime ||
            m.t_rpc < sim::kZeroTime)
        {
            throw std::invalid_argument("http_model_eval: negative phase duration");
        }
        HttpModelResult r;
        r.latency_impact = sim::kZeroTime;
        r.capacity_loss_servers = 1;
        r.capacity_downtime = m.t_trailers + m.t_gc + m.t_rpc;
        r.event_time = m.t_schedule + r.capacity_downtime;
        return r;
    }
}
