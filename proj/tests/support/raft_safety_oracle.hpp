#pragma once

// Independent safety checker over a finished Raft run: reads only the trace and
// the final logs, never the nodes' internal bookkeeping.

#include "blade/raft/raft_cluster.hpp"

#include <map>
#include <string>
#include <vector>

namespace oracle
{
    struct SafetyReport
    {
        std::vector<std::string> violations;
        bool ok() const noexcept { return violations.empty(); }
    };

    inline SafetyReport check_raft_safety(const blade::raft::RaftCluster &cluster)
    {
        using blade::raft::TraceKind;
        SafetyReport rep;
        auto fail = [&rep](std::string s) { rep.violations.push_back(std::move(s)); };

        // Election safety: one leader per term.
        std::map<std::uint64_t, std::uint32_t> leader_of;
        for (const auto &e : cluster.trace())
        {
            if (e.kind != TraceKind::BecameLeader)
            {
                continue;
            }
            auto [it, fresh] = leader_of.emplace(e.term, e.node.value);
            if (!fresh && it->second != e.node.value)
            {
                fail("two leaders in term " + std::to_string(e.term));
            }
        }

        // Log matching: past the first differing index, no index may agree on term.
        for (std::size_t a = 0; a < cluster.size(); ++a)
        {
            for (std::size_t b = a + 1; b < cluster.size(); ++b)
            {
                const auto &la = cluster.node(a).log();
                const auto &lb = cluster.node(b).log();
                const std::size_t n = std::min(la.size(), lb.size());
                std::size_t first_diff = n;
                for (std::size_t i = 0; i < n; ++i)
                {
                    if (!(la[i] == lb[i]))
                    {
                        first_diff = i;
                        break;
                    }
                }
                for (std::size_t i = first_diff; i < n; ++i)
                {
                    if (la[i].term == lb[i].term)
                    {
                        fail("log matching broken between nodes " + std::to_string(a) + " and " + std::to_string(b) +
                             " at index " + std::to_string(i));
                        break;
                    }
                }
            }
        }

        // State-machine safety: every node applies the same entry at each index, in order.
        std::map<std::uint64_t, std::pair<std::uint64_t, std::uint64_t>> applied;
        std::map<std::uint32_t, std::uint64_t> last_applied;
        for (const auto &e : cluster.trace())
        {
            if (e.kind != TraceKind::Applied)
            {
                continue;
            }
            auto &last = last_applied[e.node.value];
            if (e.index != last + 1)
            {
                fail("node " + std::to_string(e.node.value) + " applied index " + std::to_string(e.index) +
                     " after " + std::to_string(last));
            }
            last = e.index;
            const auto entry = std::make_pair(e.term, e.request_id);
            auto [it, fresh] = applied.emplace(e.index, entry);
            if (!fresh && it->second != entry)
            {
                fail("different entries applied at index " + std::to_string(e.index));
            }
        }

        // Applied entries survive in every log long enough to hold them.
        for (const auto &[index, entry] : applied)
        {
            for (std::size_t n = 0; n < cluster.size(); ++n)
            {
                const auto &log = cluster.node(n).log();
                if (index < log.size() && cluster.node(n).commit_index() >= index &&
                    (log[index].term != entry.first || log[index].request_id != entry.second))
                {
                    fail("committed entry " + std::to_string(index) + " differs on node " + std::to_string(n));
                }
            }
        }
        return rep;
    }

    /// Largest number of servers simultaneously paused for leader-admitted collections.
    inline std::size_t max_granted_paused(const blade::raft::RaftCluster &cluster)
    {
        using blade::raft::TraceKind;
        std::map<std::uint32_t, bool> granted;
        std::size_t now = 0, peak = 0;
        for (const auto &e : cluster.trace())
        {
            if (e.kind == TraceKind::PauseBegin && e.granted)
            {
                granted[e.node.value] = true;
                peak = std::max(peak, ++now);
            }
            else if (e.kind == TraceKind::PauseEnd && granted[e.node.value])
            {
                granted[e.node.value] = false;
                --now;
            }
        }
        return peak;
    }
}
