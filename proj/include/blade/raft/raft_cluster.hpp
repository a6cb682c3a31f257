#pragma once

#include "blade/metrics/latency.hpp"
#include "blade/metrics/workload.hpp"
#include "blade/raft/raft_node.hpp"
#include "blade/sim/network.hpp"

#include <memory>
#include <span>
#include <unordered_map>
#include <vector>

namespace blade::raft
{
    using metrics::LatencySample;

    struct NodeOverride
    {
        std::optional<runtime::RuntimeConfig> runtime;
        std::optional<Bytes> background_rate;
        std::optional<Bytes> bytes_per_request;
    };

    struct RaftClusterConfig
    {
        std::size_t nodes = 3;
        sim::NetworkModel network = sim::NetworkModel::from_rtt(SimTime::micros(48));
        runtime::RuntimeConfig runtime = default_runtime();
        GcMode mode = GcMode::Blade;
        RaftConfig raft;
        /// Allocation independent of requests, bytes per second per node.
        Bytes background_rate = 2 * sim::kMiB;
        /// Indexed by node; missing entries use the shared settings.
        std::vector<NodeOverride> overrides;
        /// Node leading term 1 at time zero; unset starts with an election.
        std::optional<std::size_t> bootstrap_leader = 0;
        std::uint64_t seed = 1;

        static runtime::RuntimeConfig default_runtime()
        {
            runtime::RuntimeConfig rt;
            rt.live_bytes = 200 * sim::kMiB;
            return rt;
        }
    };

    /// Replicated key-value store: n Raft servers plus one open-loop client.
    class RaftCluster
    {
    public:
        explicit RaftCluster(RaftClusterConfig config);

        RaftCluster(const RaftCluster &) = delete;
        RaftCluster &operator=(const RaftCluster &) = delete;

        void schedule_workload(std::span<const metrics::Arrival> arrivals);
        /// Forces a collection on `node` at `at` unless it is already paused.
        void inject_collection(std::size_t node, SimTime at);
        /// Forces a collection on whichever node leads at `at`.
        void inject_leader_collection(SimTime at);
        sim::SimStats run_until(SimTime deadline);

        sim::Simulator &simulator() noexcept { return m_sim; }
        sim::Network &network() noexcept { return m_net; }
        const RaftClusterConfig &config() const noexcept { return m_config; }

        std::size_t size() const noexcept { return m_nodes.size(); }
        RaftNode &node(std::size_t i) { return *m_nodes.at(i); }
        const RaftNode &node(std::size_t i) const { return *m_nodes.at(i); }
        RaftNode &node(NodeId id) { return *m_nodes.at(id.value); }
        NodeId client_id() const noexcept { return m_client; }
        /// Highest-term node currently in the leader role.
        std::optional<NodeId> leader() const;

        const std::vector<LatencySample> &samples() const noexcept { return m_samples; }
        const std::vector<TraceEvent> &trace() const noexcept { return m_trace; }
        std::vector<metrics::PauseInterval> pause_intervals() const;
        std::uint64_t issued() const noexcept { return m_issued; }
        std::uint64_t completed() const noexcept { return m_samples.size(); }
        std::uint64_t in_flight() const noexcept { return m_outstanding.size(); }

        void client_reply(std::uint64_t request_id, NodeId server);
        void client_redirect(std::uint64_t request_id, std::optional<NodeId> leader);
        void client_notice(NodeId leader, std::uint64_t term);
        void record(const TraceEvent &e) { m_trace.push_back(e); }

    private:
        struct Outstanding
        {
            ClientRequest request;
            SimTime issued_at;
        };

        void client_send(const ClientRequest &req);

        RaftClusterConfig m_config;
        sim::Simulator m_sim;
        sim::Network m_net;
        std::vector<std::unique_ptr<RaftNode>> m_nodes;
        NodeId m_client;
        NodeId m_client_leader;
        std::uint64_t m_client_term = 0;
        std::unordered_map<std::uint64_t, Outstanding> m_outstanding;
        std::vector<LatencySample> m_samples;
        std::vector<TraceEvent> m_trace;
        std::uint64_t m_issued = 0;
    };
}
