#pragma once

#include "blade/metrics/latency.hpp"
#include "blade/sim/sim_time.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace blade::raft
{
    using sim::NodeId;
    using sim::SimTime;

    struct ClientRequest
    {
        std::uint64_t request_id = 0;
        metrics::RequestKind kind = metrics::RequestKind::Get;
        std::string key;
        std::string value;
        std::uint32_t hops = 0;
    };

    /// request_id 0 marks the no-op a new leader appends.
    struct LogEntry
    {
        std::uint64_t term = 0;
        std::uint64_t request_id = 0;
        std::string key;
        std::string value;

        bool noop() const noexcept { return request_id == 0; }
        bool operator==(const LogEntry &) const = default;
    };

    struct RequestVote
    {
        std::uint64_t term = 0;
        NodeId candidate;
        std::uint64_t last_index = 0;
        std::uint64_t last_term = 0;
    };

    struct VoteReply
    {
        std::uint64_t term = 0;
        NodeId from;
        bool granted = false;
    };

    struct AppendEntries
    {
        std::uint64_t term = 0;
        NodeId leader;
        std::uint64_t prev_index = 0;
        std::uint64_t prev_term = 0;
        std::vector<LogEntry> entries;
        std::uint64_t leader_commit = 0;
    };

    struct AppendReply
    {
        std::uint64_t term = 0;
        NodeId from;
        bool success = false;
        std::uint64_t match_index = 0;
        std::uint64_t last_index = 0;
    };

    /// Client reply owed once log index `index` commits.
    struct PendingReply
    {
        std::uint64_t index = 0;
        std::uint64_t request_id = 0;
    };

    /// Broadcast by a leader handing over before it collects. Doubles as the
    /// outgoing leader's vote for the successor in the new term.
    struct LeaderSwitch
    {
        std::uint64_t new_term = 0;
        NodeId old_leader;
        NodeId successor;
        std::uint64_t last_index = 0;
        std::uint64_t last_term = 0;
        std::vector<ClientRequest> forwarded;
        std::vector<PendingReply> pending;
        /// Collections the old leader had admitted, itself included.
        std::vector<NodeId> collecting;
    };

    struct AskGc
    {
        NodeId from;
        std::uint64_t id = 0;
        SimTime estimated_pause;
    };

    struct AllowGc
    {
        std::uint64_t id = 0;
    };

    struct DoneGc
    {
        NodeId from;
        std::uint64_t id = 0;
        bool forwarded = false;
    };
}
