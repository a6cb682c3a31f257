#include "blade/raft/gc_ledger.hpp"

#include <algorithm>
#include <stdexcept>

namespace blade::raft
{
    GcLedger::GcLedger(NodeId self, std::size_t cluster_size, NodeId initial_last_gc)
        : m_self(self), m_cluster_size(cluster_size), m_last_gc(initial_last_gc)
    {
        if (cluster_size == 0)
        {
            throw std::invalid_argument("GcLedger: empty cluster");
        }
    }

    LedgerAction GcLedger::admit(NodeId node)
    {
        m_granted.insert(node);
        if (node == m_self)
        {
            return SwitchLeader{m_last_gc};
        }
        return GrantGc{node};
    }

    std::vector<LedgerAction> GcLedger::on_request(NodeId from)
    {
        if (m_granted.contains(from) || std::find(m_pending.begin(), m_pending.end(), from) != m_pending.end())
        {
            return {};
        }
        if (!can_grant())
        {
            m_pending.push_back(from);
            return {};
        }
        return {admit(from)};
    }

    std::vector<LedgerAction> GcLedger::release(NodeId node)
    {
        if (auto it = std::find(m_pending.begin(), m_pending.end(), node); it != m_pending.end())
        {
            m_pending.erase(it);
        }
        std::vector<LedgerAction> actions;
        if (m_granted.erase(node) == 0)
        {
            return actions;
        }
        while (!m_pending.empty() && can_grant())
        {
            const NodeId next = m_pending.front();
            m_pending.pop_front();
            actions.push_back(admit(next));
        }
        return actions;
    }

    std::vector<LedgerAction> GcLedger::on_finished(NodeId from)
    {
        m_last_gc = from;
        return release(from);
    }

    std::vector<LedgerAction> GcLedger::on_timeout(NodeId from)
    {
        return release(from);
    }

    void GcLedger::on_leader_change()
    {
        m_granted.clear();
        m_pending.clear();
    }

    void GcLedger::adopt(NodeId collecting)
    {
        m_granted.insert(collecting);
    }
}
