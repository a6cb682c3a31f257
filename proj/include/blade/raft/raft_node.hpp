#pragma once

#include "blade/raft/follower_gc.hpp"
#include "blade/raft/gc_ledger.hpp"
#include "blade/raft/messages.hpp"
#include "blade/runtime/gc_mode.hpp"
#include "blade/runtime/node_host.hpp"

#include <deque>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <set>
#include <string_view>
#include <vector>

namespace blade::raft
{
    using runtime::GcMode;
    using sim::Bytes;

    class RaftCluster;

    enum class Role
    {
        Follower,
        Candidate,
        Leader,
    };

    std::string_view to_string(Role r) noexcept;

    enum class ClientHandling
    {
        /// Non-leaders forward client requests to the leader they know.
        Proxy,
        /// Non-leaders answer with the leader's identity and the client resends.
        Redirect,
    };

    struct RaftConfig
    {
        SimTime election_timeout_min = SimTime::millis(150);
        SimTime election_timeout_max = SimTime::millis(300);
        SimTime heartbeat = SimTime::millis(50);
        SimTime service_time = SimTime::micros(400);
        std::size_t parallelism = 4;
        /// Allocated by the leader per processed request and by followers per appended entry.
        Bytes bytes_per_request = 16 * sim::kKiB;
        SimTime defer_threshold = SimTime::millis(1);
        ClientHandling client_handling = ClientHandling::Proxy;
        /// Time the outgoing leader keeps forwarding stragglers before pausing;
        /// unset means one network round trip.
        std::optional<SimTime> proxy_window;
        /// A granted collection not reported within factor x its estimate is reclaimed.
        std::int64_t collection_timeout_factor = 10;
        std::size_t max_batch = 64;
        SimTime client_retry = SimTime::millis(10);
    };

    enum class TraceKind
    {
        BecameLeader,
        SteppedDown,
        Applied,
        SwitchSent,
        GcGranted,
        GcReleased,
        PauseBegin,
        PauseEnd,
    };

    struct TraceEvent
    {
        SimTime at;
        TraceKind kind = TraceKind::Applied;
        NodeId node;
        std::uint64_t term = 0;
        std::uint64_t index = 0;
        std::uint64_t request_id = 0;
        NodeId other;
        Role role = Role::Follower;
        /// PauseBegin: the collection was admitted by a leader.
        bool granted = false;
    };

    class RaftNode
    {
    public:
        RaftNode(RaftCluster &cluster, runtime::RuntimeConfig runtime, RaftConfig config, GcMode mode,
                 std::size_t cluster_size, std::uint64_t seed);

        RaftNode(const RaftNode &) = delete;
        RaftNode &operator=(const RaftNode &) = delete;

        /// Bootstraps every node into term 1 under `leader`, or leaves them to elect.
        void start(std::optional<NodeId> leader);

        void on_client_request(ClientRequest req);
        void on_request_vote(const RequestVote &m);
        void on_vote_reply(const VoteReply &m);
        void on_append(const AppendEntries &m);
        void on_append_reply(const AppendReply &m);
        void on_switch(const LeaderSwitch &m);
        void on_ask_gc(const AskGc &m);
        void on_allow_gc(const AllowGc &m);
        void on_done_gc(const DoneGc &m);

        NodeId id() const noexcept { return m_host->id(); }
        runtime::NodeHost &host() noexcept { return *m_host; }
        const runtime::NodeHost &host() const noexcept { return *m_host; }
        Role role() const noexcept { return m_role; }
        std::uint64_t term() const noexcept { return m_term; }
        std::optional<NodeId> leader() const noexcept { return m_leader; }
        std::uint64_t commit_index() const noexcept { return m_commit; }
        std::uint64_t last_index() const noexcept { return m_log.size() - 1; }
        /// Index 0 is a sentinel with term 0.
        const std::vector<LogEntry> &log() const noexcept { return m_log; }
        const std::map<std::string, std::string> &state() const noexcept { return m_kv; }
        const GcLedger &ledger() const noexcept { return m_ledger; }
        const FollowerGc &follower_gc() const noexcept { return m_follower_gc; }
        bool switching() const noexcept { return m_switching; }

        /// Per-node allocation knobs; zero disables request-driven allocation.
        void set_bytes_per_request(Bytes b) noexcept { m_cfg.bytes_per_request = b; }

    private:
        struct Ask
        {
            std::uint64_t id = 0;
            SimTime estimate;
            std::uint64_t epoch = 0;
        };

        std::size_t peer_index(NodeId n) const;
        std::uint64_t term_at(std::uint64_t index) const { return m_log[index].term; }
        bool up_to_date(std::uint64_t last_term, std::uint64_t last_index) const;
        std::size_t quorum() const noexcept { return majority(m_n); }
        template <typename F>
        void send(NodeId to, const char *label, F &&fn);
        void trace(TraceKind kind, std::uint64_t index = 0, std::uint64_t request_id = 0, NodeId other = {});

        void reset_election_timer();
        void on_election_timeout();
        void become_follower(std::uint64_t term);
        void become_leader();
        void set_leader(std::optional<NodeId> leader);
        void heartbeat_tick(std::uint64_t gen);

        void route(ClientRequest req);
        void process(ClientRequest req);
        void finish_request(const ClientRequest &req);
        void reply_to_client(std::uint64_t request_id);
        void redirect_client(std::uint64_t request_id, std::optional<NodeId> leader);

        void replicate_all();
        void send_append(std::size_t peer);
        void advance_commit();
        void apply_committed();

        bool on_upcall(const runtime::CollectionTicket &ticket);
        void request_collection(std::uint64_t id);
        void ask_leader();
        void execute(const std::vector<LedgerAction> &actions);
        void begin_switch(NodeId hint);
        void check_switch_ready();
        void do_switch();
        void start_granted_collection(std::uint64_t id);

        RaftCluster &m_cluster;
        std::unique_ptr<runtime::NodeHost> m_host;
        RaftConfig m_cfg;
        GcMode m_mode;
        std::size_t m_n;
        std::mt19937_64 m_rng;

        Role m_role = Role::Follower;
        std::uint64_t m_term = 0;
        std::optional<NodeId> m_voted_for;
        std::optional<NodeId> m_leader;
        std::vector<LogEntry> m_log;
        std::uint64_t m_commit = 0;
        std::uint64_t m_applied = 0;
        std::map<std::string, std::string> m_kv;
        std::set<NodeId> m_votes;
        std::vector<std::uint64_t> m_next;
        std::vector<std::uint64_t> m_match;
        std::map<std::uint64_t, std::uint64_t> m_pending_replies;
        std::deque<ClientRequest> m_held;
        std::uint64_t m_election_gen = 0;
        std::uint64_t m_heartbeat_gen = 0;

        GcLedger m_ledger;
        FollowerGc m_follower_gc;
        SimTime m_gc_estimate;
        std::map<NodeId, Ask> m_asks;
        std::uint64_t m_grant_epoch = 0;
        bool m_switching = false;
        NodeId m_switch_target;
        std::optional<LeaderSwitch> m_carried;
        bool m_starting_granted = false;
    };
}
