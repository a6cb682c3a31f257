#include "blade/http/http_cluster.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace blade::http
{
    HttpCluster::HttpCluster(HttpClusterConfig config)
        : m_config(std::move(config)), m_sim(m_config.seed), m_net(m_sim, m_config.network),
          m_coordinator(m_config.max_concurrent), m_router(m_config.backends)
    {
        if (m_config.parallelism == 0)
        {
            throw std::invalid_argument("HttpCluster: parallelism must be positive");
        }
        m_balancer = m_net.add_node();
        auto rt = m_config.runtime;
        rt.collection_enabled = m_config.mode != GcMode::Off;
        m_backends.resize(m_config.backends);
        for (std::size_t b = 0; b < m_backends.size(); ++b)
        {
            auto &be = m_backends[b];
            be.host = std::make_unique<runtime::NodeHost>(m_net, rt, m_config.parallelism);
            if (m_config.mode == GcMode::Blade)
            {
                be.host->runtime().reg_gc_hand([this, b](const runtime::CollectionTicket &t) { return on_upcall(b, t); });
            }
            be.host->start_background_allocation(m_config.background_rate, SimTime::millis(10));
        }
        m_client = m_net.add_node();
    }

    BackendState HttpCluster::backend_state(std::size_t i) const
    {
        const auto &be = m_backends.at(i);
        return {be.host->id(), be.status, be.in_flight};
    }

    std::vector<metrics::PauseInterval> HttpCluster::pause_intervals() const
    {
        std::vector<metrics::PauseInterval> out;
        for (const auto &be : m_backends)
        {
            for (const auto &p : be.host->runtime().pauses())
            {
                out.push_back({be.host->id(), p.start, p.end});
            }
        }
        return out;
    }

    void HttpCluster::schedule_workload(std::span<const metrics::Arrival> arrivals)
    {
        for (const auto &a : arrivals)
        {
            m_sim.schedule(a.at, m_client, "client-send",
                           [this, id = a.request_id]
                           {
                               ++m_issued;
                               Request req{id, m_sim.now()};
                               m_net.send(m_client, m_balancer, "request", [this, req] { lb_receive(req); });
                           });
        }
    }

    sim::SimStats HttpCluster::run_until(SimTime deadline)
    {
        return m_sim.run_until(deadline);
    }

    void HttpCluster::lb_receive(Request req)
    {
        if (auto b = m_router.route())
        {
            forward(*b, req);
        }
        else
        {
            m_lb_queue.push_back(req);
        }
    }

    void HttpCluster::forward(std::size_t b, Request req)
    {
        m_routes.push_back(b);
        m_net.send(m_balancer, m_backends[b].host->id(), "request", [this, b, req] { backend_receive(b, req); });
    }

    void HttpCluster::backend_receive(std::size_t b, Request req)
    {
        auto &be = m_backends[b];
        ++be.in_flight;
        SimTime service = m_config.service_time;
        if (m_config.mode == GcMode::Off && m_config.gc_off_slowdown > 0.0)
        {
            service += SimTime::micros(
                std::llround(static_cast<double>(service.count()) * m_config.gc_off_slowdown));
        }
        const SimTime arrived = m_sim.now();
        be.host->processor().submit(
            service, [this, b] { m_backends[b].host->runtime().allocate(m_config.bytes_per_request); },
            [this, b, req, arrived] { backend_done(b, req, arrived); });
    }

    void HttpCluster::backend_done(std::size_t b, Request req, SimTime arrived)
    {
        auto &be = m_backends[b];
        --be.in_flight;
        m_service.push_back({req.id, b, arrived, m_sim.now()});
        const NodeId server = be.host->id();
        m_net.send(server, m_balancer, "response",
                   [this, req, server]
                   {
                       m_net.send(m_balancer, m_client, "response",
                                  [this, req, server]
                                  {
                                      m_samples.push_back(
                                          {req.id, req.issued_at, m_sim.now(), server, metrics::RequestKind::Http});
                                  });
                   });
        if (be.status == BackendStatus::Draining && be.in_flight == 0)
        {
            begin_collection(b);
        }
    }

    bool HttpCluster::on_upcall(std::size_t b, const runtime::CollectionTicket &ticket)
    {
        if (ticket.estimated_pause <= m_config.defer_threshold)
        {
            return true;
        }
        GcTimeline tl;
        tl.backend = m_backends[b].host->id();
        tl.ticket = ticket.id;
        tl.upcall_at = m_sim.now();
        m_timelines.push_back(tl);
        m_backends[b].timeline = m_timelines.size() - 1;
        // The upcall runs on an allocating thread; the protocol continues on its own.
        m_backends[b].host->after(sim::kZeroTime, "blade-gc", [this, b, id = ticket.id] { blade_gc(b, id); });
        return false;
    }

    void HttpCluster::blade_gc(std::size_t b, std::uint64_t id)
    {
        auto &be = m_backends[b];
        be.ticket = id;
        be.status = BackendStatus::AwaitingSchedule;
        m_net.send(be.host->id(), m_balancer, "ask-gc", [this, b] { coordinator_ask(b); });
    }

    void HttpCluster::coordinator_ask(std::size_t b)
    {
        if (m_coordinator.decide(m_backends[b].host->id()) == Coordinator::Decision::Granted)
        {
            grant(b);
        }
    }

    void HttpCluster::grant(std::size_t b)
    {
        m_router.set_available(b, false);
        m_net.send(m_balancer, m_backends[b].host->id(), "allow-gc", [this, b] { backend_granted(b); });
    }

    void HttpCluster::backend_granted(std::size_t b)
    {
        auto &be = m_backends[b];
        be.status = BackendStatus::Draining;
        m_timelines[be.timeline].granted_at = m_sim.now();
        if (be.in_flight == 0)
        {
            begin_collection(b);
        }
    }

    void HttpCluster::begin_collection(std::size_t b)
    {
        auto &be = m_backends[b];
        be.status = BackendStatus::Collecting;
        auto &tl = m_timelines[be.timeline];
        tl.gc_start = m_sim.now();
        const auto before = be.host->runtime().ticket(be.ticket);
        tl.forced = before && before->state == runtime::TicketState::ForcedCompleted;
        be.host->runtime().start_gc(be.ticket,
                                    [this, b]
                                    {
                                        auto &be = m_backends[b];
                                        be.status = BackendStatus::Notifying;
                                        m_timelines[be.timeline].gc_end = m_sim.now();
                                        m_net.send(be.host->id(), m_balancer, "done-gc",
                                                   [this, b] { coordinator_done(b); });
                                    });
    }

    void HttpCluster::coordinator_done(std::size_t b)
    {
        auto &be = m_backends[b];
        auto &tl = m_timelines[be.timeline];
        tl.done_at = m_sim.now();
        tl.complete = true;
        be.status = BackendStatus::Serving;
        m_router.set_available(b, true);
        if (auto next = m_coordinator.on_done(be.host->id()))
        {
            grant(next->value - m_backends.front().host->id().value);
        }
        while (!m_lb_queue.empty())
        {
            auto target = m_router.route();
            if (!target)
            {
                break;
            }
            forward(*target, m_lb_queue.front());
            m_lb_queue.pop_front();
        }
    }
}
