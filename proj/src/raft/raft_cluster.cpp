#include "blade/raft/raft_cluster.hpp"

#include <stdexcept>
#include <string>
#include <utility>

namespace blade::raft
{
    RaftCluster::RaftCluster(RaftClusterConfig config)
        : m_config(std::move(config)), m_sim(m_config.seed), m_net(m_sim, m_config.network)
    {
        if (m_config.nodes == 0)
        {
            throw std::invalid_argument("RaftCluster: no nodes");
        }
        if (m_config.bootstrap_leader && *m_config.bootstrap_leader >= m_config.nodes)
        {
            throw std::invalid_argument("RaftCluster: bootstrap leader out of range");
        }
        for (std::size_t i = 0; i < m_config.nodes; ++i)
        {
            const NodeOverride *ov = i < m_config.overrides.size() ? &m_config.overrides[i] : nullptr;
            auto rt = ov && ov->runtime ? *ov->runtime : m_config.runtime;
            m_nodes.push_back(std::make_unique<RaftNode>(*this, std::move(rt), m_config.raft, m_config.mode,
                                                         m_config.nodes, m_config.seed * 1'000'003 + i));
            if (ov && ov->bytes_per_request)
            {
                m_nodes.back()->set_bytes_per_request(*ov->bytes_per_request);
            }
            const Bytes rate = ov && ov->background_rate ? *ov->background_rate : m_config.background_rate;
            m_nodes.back()->host().start_background_allocation(rate, SimTime::millis(10));
        }
        m_client = m_net.add_node();
        m_client_leader = NodeId{static_cast<std::uint32_t>(m_config.bootstrap_leader.value_or(0))};
        std::optional<NodeId> boot;
        if (m_config.bootstrap_leader)
        {
            boot = NodeId{static_cast<std::uint32_t>(*m_config.bootstrap_leader)};
        }
        for (auto &n : m_nodes)
        {
            n->start(boot);
        }
    }

    std::optional<NodeId> RaftCluster::leader() const
    {
        std::optional<NodeId> best;
        std::uint64_t term = 0;
        for (const auto &n : m_nodes)
        {
            if (n->role() == Role::Leader && (!best || n->term() > term))
            {
                best = n->id();
                term = n->term();
            }
        }
        return best;
    }

    std::vector<metrics::PauseInterval> RaftCluster::pause_intervals() const
    {
        std::vector<metrics::PauseInterval> out;
        for (const auto &n : m_nodes)
        {
            for (const auto &p : n->host().runtime().pauses())
            {
                out.push_back({n->id(), p.start, p.end});
            }
        }
        return out;
    }

    void RaftCluster::schedule_workload(std::span<const metrics::Arrival> arrivals)
    {
        for (const auto &a : arrivals)
        {
            ClientRequest req;
            req.request_id = a.request_id;
            req.kind = a.kind == metrics::RequestKind::Set ? metrics::RequestKind::Set : metrics::RequestKind::Get;
            req.key = "k" + std::to_string(a.request_id % 1024);
            if (req.kind == metrics::RequestKind::Set)
            {
                req.value = "v" + std::to_string(a.request_id);
            }
            m_sim.schedule(a.at, m_client, "client-send",
                           [this, req = std::move(req)]
                           {
                               ++m_issued;
                               m_outstanding[req.request_id] = {req, m_sim.now()};
                               client_send(req);
                           });
        }
    }

    void RaftCluster::inject_collection(std::size_t node, SimTime at)
    {
        auto &n = *m_nodes.at(node);
        m_sim.schedule(at, n.id(), "inject-gc",
                       [&n]
                       {
                           if (!n.host().paused())
                           {
                               n.host().runtime().collect_now();
                           }
                       });
    }

    void RaftCluster::inject_leader_collection(SimTime at)
    {
        m_sim.schedule(at, m_client, "inject-leader-gc",
                       [this]
                       {
                           if (auto l = leader(); l && !node(*l).host().paused())
                           {
                               node(*l).host().runtime().collect_now();
                           }
                       });
    }

    sim::SimStats RaftCluster::run_until(SimTime deadline)
    {
        return m_sim.run_until(deadline);
    }

    void RaftCluster::client_send(const ClientRequest &req)
    {
        const NodeId to = m_client_leader;
        m_net.send(m_client, to, "request", [this, to, req] { node(to).on_client_request(req); });
    }

    void RaftCluster::client_reply(std::uint64_t request_id, NodeId server)
    {
        auto it = m_outstanding.find(request_id);
        if (it == m_outstanding.end())
        {
            return;
        }
        m_samples.push_back({request_id, it->second.issued_at, m_sim.now(), server, it->second.request.kind});
        m_outstanding.erase(it);
    }

    void RaftCluster::client_redirect(std::uint64_t request_id, std::optional<NodeId> leader)
    {
        auto it = m_outstanding.find(request_id);
        if (it == m_outstanding.end())
        {
            return;
        }
        ClientRequest req = it->second.request;
        if (leader)
        {
            m_client_leader = *leader;
            client_send(req);
            return;
        }
        m_sim.schedule_after(m_config.raft.client_retry, m_client, "client-retry",
                             [this, req]
                             {
                                 if (m_outstanding.contains(req.request_id))
                                 {
                                     client_send(req);
                                 }
                             });
    }

    void RaftCluster::client_notice(NodeId leader, std::uint64_t term)
    {
        if (term >= m_client_term)
        {
            m_client_term = term;
            m_client_leader = leader;
        }
    }
}
