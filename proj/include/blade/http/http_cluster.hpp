#pragma once

#include "blade/http/coordinator.hpp"
#include "blade/metrics/latency.hpp"
#include "blade/metrics/workload.hpp"
#include "blade/runtime/gc_mode.hpp"
#include "blade/runtime/node_host.hpp"
#include "blade/sim/network.hpp"

#include <deque>
#include <memory>
#include <span>
#include <vector>

namespace blade::http
{
    using metrics::LatencySample;
    using runtime::GcMode;
    using sim::Bytes;
    using sim::SimTime;

    enum class BackendStatus
    {
        Serving,
        AwaitingSchedule,
        Draining,
        Collecting,
        Notifying,
    };

    struct BackendState
    {
        NodeId id;
        BackendStatus status = BackendStatus::Serving;
        std::size_t in_flight = 0;
    };

    struct HttpClusterConfig
    {
        std::size_t backends = 3;
        sim::NetworkModel network = sim::NetworkModel::from_rtt(SimTime::micros(48));
        runtime::RuntimeConfig runtime;
        GcMode mode = GcMode::Blade;
        SimTime service_time = SimTime::millis(2);
        std::size_t parallelism = 8;
        std::size_t max_concurrent = 1;
        Bytes bytes_per_request = 6554;
        /// Allocation independent of requests, bytes per second.
        Bytes background_rate = 0;
        /// Collections whose estimated pause is at most this run immediately.
        SimTime defer_threshold = SimTime::millis(1);
        /// Extra service time fraction while the collector is disabled.
        double gc_off_slowdown = 0.0;
        std::uint64_t seed = 1;
    };

    /// Timestamps of one backend collection, from upcall to the balancer's receipt
    /// of the completion notice.
    struct GcTimeline
    {
        NodeId backend;
        std::uint64_t ticket = 0;
        SimTime upcall_at;
        SimTime granted_at;
        SimTime gc_start;
        SimTime gc_end;
        SimTime done_at;
        bool forced = false;
        bool complete = false;

        SimTime t_schedule() const noexcept { return granted_at - upcall_at; }
        SimTime t_trailers() const noexcept { return gc_start - granted_at; }
        SimTime t_gc() const noexcept { return gc_end - gc_start; }
        SimTime t_rpc() const noexcept { return done_at - gc_end; }
        SimTime event_time() const noexcept { return done_at - upcall_at; }
    };

    /// Interval a request spent at its backend, arrival to response.
    struct ServiceRecord
    {
        std::uint64_t request_id = 0;
        std::size_t backend = 0;
        SimTime arrived;
        SimTime departed;
    };

    /// Client, round-robin balancer with co-located collection coordinator, and
    /// backend web servers, all inside one simulation.
    class HttpCluster
    {
    public:
        explicit HttpCluster(HttpClusterConfig config);

        HttpCluster(const HttpCluster &) = delete;
        HttpCluster &operator=(const HttpCluster &) = delete;

        void schedule_workload(std::span<const metrics::Arrival> arrivals);
        sim::SimStats run_until(SimTime deadline);

        sim::Simulator &simulator() noexcept { return m_sim; }
        sim::Network &network() noexcept { return m_net; }
        const HttpClusterConfig &config() const noexcept { return m_config; }

        std::size_t backend_count() const noexcept { return m_backends.size(); }
        runtime::NodeHost &backend_host(std::size_t i) { return *m_backends.at(i).host; }
        BackendState backend_state(std::size_t i) const;
        NodeId balancer_id() const noexcept { return m_balancer; }
        NodeId client_id() const noexcept { return m_client; }
        const Coordinator &coordinator() const noexcept { return m_coordinator; }

        const std::vector<LatencySample> &samples() const noexcept { return m_samples; }
        const std::vector<ServiceRecord> &service_records() const noexcept { return m_service; }
        const std::vector<GcTimeline> &gc_timelines() const noexcept { return m_timelines; }
        const std::vector<std::size_t> &route_log() const noexcept { return m_routes; }
        std::vector<metrics::PauseInterval> pause_intervals() const;

        std::uint64_t issued() const noexcept { return m_issued; }
        std::uint64_t completed() const noexcept { return m_samples.size(); }
        std::uint64_t in_flight() const noexcept { return m_issued - m_samples.size(); }
        std::size_t queued_at_balancer() const noexcept { return m_lb_queue.size(); }

    private:
        struct Request
        {
            std::uint64_t id = 0;
            SimTime issued_at;
        };
        struct Backend
        {
            std::unique_ptr<runtime::NodeHost> host;
            BackendStatus status = BackendStatus::Serving;
            std::size_t in_flight = 0;
            std::uint64_t ticket = 0;
            std::size_t timeline = 0;
        };

        bool on_upcall(std::size_t b, const runtime::CollectionTicket &ticket);
        void lb_receive(Request req);
        void forward(std::size_t b, Request req);
        void backend_receive(std::size_t b, Request req);
        void backend_done(std::size_t b, Request req, SimTime arrived);
        void blade_gc(std::size_t b, std::uint64_t id);
        void coordinator_ask(std::size_t b);
        void grant(std::size_t b);
        void backend_granted(std::size_t b);
        void begin_collection(std::size_t b);
        void coordinator_done(std::size_t b);

        HttpClusterConfig m_config;
        sim::Simulator m_sim;
        sim::Network m_net;
        NodeId m_balancer;
        NodeId m_client;
        std::vector<Backend> m_backends;
        Coordinator m_coordinator;
        RoundRobinRouter m_router;
        std::deque<Request> m_lb_queue;
        std::vector<LatencySample> m_samples;
        std::vector<ServiceRecord> m_service;
        std::vector<GcTimeline> m_timelines;
        std::vector<std::size_t> m_routes;
        std::uint64_t m_issued = 0;
    };
}
