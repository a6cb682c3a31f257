#pragma once

#include "blade/sim/sim_time.hpp"

#include <deque>
#include <set>
#include <variant>
#include <vector>

namespace blade::raft
{
    using sim::NodeId;

    struct GrantGc
    {
        NodeId to;
        bool operator==(const GrantGc &) const = default;
    };

    /// The leader itself was admitted: hand leadership over before collecting.
    struct SwitchLeader
    {
        NodeId successor_hint;
        bool operator==(const SwitchLeader &) const = default;
    };

    using LedgerAction = std::variant<GrantGc, SwitchLeader>;

    inline std::size_t majority(std::size_t cluster_size) noexcept { return cluster_size / 2 + 1; }

    /// Leader-side admission of follower collections. A request is admitted only if
    /// the servers left running still form a quorum; otherwise it waits in FIFO order.
    class GcLedger
    {
    public:
        GcLedger(NodeId self, std::size_t cluster_size, NodeId initial_last_gc);

        /// Repeated requests from a node already admitted or waiting are ignored.
        std::vector<LedgerAction> on_request(NodeId from);
        std::vector<LedgerAction> on_finished(NodeId from);
        /// A granted collector that never reported back; released without becoming last_gc.
        std::vector<LedgerAction> on_timeout(NodeId from);

        /// New leadership: nothing granted, nothing waiting.
        void on_leader_change();
        /// Counts a collection already in progress when this ledger took over.
        void adopt(NodeId collecting);

        std::size_t used() const noexcept { return m_granted.size(); }
        std::size_t quorum() const noexcept { return majority(m_cluster_size); }
        std::size_t cluster_size() const noexcept { return m_cluster_size; }
        bool can_grant() const noexcept { return used() + 1 + quorum() <= m_cluster_size; }
        const std::set<NodeId> &granted() const noexcept { return m_granted; }
        const std::deque<NodeId> &pending() const noexcept { return m_pending; }
        NodeId last_gc() const noexcept { return m_last_gc; }

    private:
        LedgerAction admit(NodeId node);
        std::vector<LedgerAction> release(NodeId node);

        NodeId m_self;
        std::size_t m_cluster_size;
        NodeId m_last_gc;
        std::set<NodeId> m_granted;
        std::deque<NodeId> m_pending;
    };
}
