#include "blade/raft/raft_node.hpp"

#include "blade/raft/raft_cluster.hpp"

#include <algorithm>
#include <stdexcept>
#include <utility>

namespace blade::raft
{
    std::string_view to_string(Role r) noexcept
    {
        switch (r)
        {
        case Role::Follower:
            return "follower";
        case Role::Candidate:
            return "candidate";
        case Role::Leader:
            return "leader";
        }
        return "?";
    }

    namespace
    {
        runtime::RuntimeConfig adjust(runtime::RuntimeConfig rt, GcMode mode)
        {
            rt.collection_enabled = mode != GcMode::Off;
            return rt;
        }
    }

    RaftNode::RaftNode(RaftCluster &cluster, runtime::RuntimeConfig rt, RaftConfig config, GcMode mode,
                       std::size_t cluster_size, std::uint64_t seed)
        : m_cluster(cluster),
          m_host(std::make_unique<runtime::NodeHost>(cluster.network(), adjust(std::move(rt), mode), config.parallelism)),
          m_cfg(config), m_mode(mode), m_n(cluster_size), m_rng(seed), m_log(1), m_next(cluster_size, 1),
          m_match(cluster_size, 0), m_ledger(m_host->id(), cluster_size, m_host->id())
    {
        if (m_cfg.election_timeout_min > m_cfg.election_timeout_max || m_cfg.election_timeout_min <= sim::kZeroTime)
        {
            throw std::invalid_argument("RaftNode: bad election timeout range");
        }
        if (m_mode == GcMode::Blade)
        {
            m_host->runtime().reg_gc_hand([this](const runtime::CollectionTicket &t) { return on_upcall(t); });
        }
        m_host->set_pause_listener(
            [this](bool begin)
            {
                TraceEvent e;
                e.at = m_host->sim().now();
                e.kind = begin ? TraceKind::PauseBegin : TraceKind::PauseEnd;
                e.node = id();
                e.term = m_term;
                e.role = m_role;
                e.granted = begin && m_starting_granted;
                m_cluster.record(e);
            });
    }

    void RaftNode::start(std::optional<NodeId> leader)
    {
        if (!leader)
        {
            reset_election_timer();
            return;
        }
        m_term = 1;
        m_voted_for = *leader;
        if (*leader == id())
        {
            become_leader();
        }
        else
        {
            m_leader = *leader;
            reset_election_timer();
        }
    }

    template <typename F>
    void RaftNode::send(NodeId to, const char *label, F &&fn)
    {
        m_cluster.network().send(id(), to, label,
                                 [&cl = m_cluster, to, fn = std::forward<F>(fn)]() mutable { fn(cl.node(to)); });
    }

    void RaftNode::trace(TraceKind kind, std::uint64_t index, std::uint64_t request_id, NodeId other)
    {
        TraceEvent e;
        e.at = m_host->sim().now();
        e.kind = kind;
        e.node = id();
        e.term = m_term;
        e.index = index;
        e.request_id = request_id;
        e.other = other;
        e.role = m_role;
        m_cluster.record(e);
    }

    std::size_t RaftNode::peer_index(NodeId n) const
    {
        if (n.value >= m_n)
        {
            throw std::out_of_range("RaftNode: unknown peer");
        }
        return n.value;
    }

    bool RaftNode::up_to_date(std::uint64_t last_term, std::uint64_t last_index) const
    {
        const std::uint64_t my_term = term_at(this->last_index());
        return last_term > my_term || (last_term == my_term && last_index >= this->last_index());
    }

    // ---- elections ----

    void RaftNode::reset_election_timer()
    {
        const std::uint64_t gen = ++m_election_gen;
        std::uniform_int_distribution<std::int64_t> dist(m_cfg.election_timeout_min.count(),
                                                         m_cfg.election_timeout_max.count());
        m_host->after(SimTime::micros(dist(m_rng)), "election",
                      [this, gen]
                      {
                          if (gen == m_election_gen)
                          {
                              on_election_timeout();
                          }
                      });
    }

    void RaftNode::on_election_timeout()
    {
        if (m_role == Role::Leader)
        {
            return;
        }
        ++m_term;
        m_role = Role::Candidate;
        m_voted_for = id();
        m_votes = {id()};
        m_carried.reset();
        set_leader(std::nullopt);
        reset_election_timer();
        if (m_votes.size() >= quorum())
        {
            become_leader();
            return;
        }
        const RequestVote rv{m_term, id(), last_index(), term_at(last_index())};
        for (std::uint32_t p = 0; p < m_n; ++p)
        {
            if (p != id().value)
            {
                send(NodeId{p}, "request-vote", [rv](RaftNode &n) { n.on_request_vote(rv); });
            }
        }
    }

    void RaftNode::on_request_vote(const RequestVote &m)
    {
        if (m.term > m_term)
        {
            become_follower(m.term);
            set_leader(std::nullopt);
        }
        const bool grant = m.term == m_term && (!m_voted_for || *m_voted_for == m.candidate) &&
                           up_to_date(m.last_term, m.last_index);
        if (grant)
        {
            m_voted_for = m.candidate;
            reset_election_timer();
        }
        const VoteReply reply{m_term, id(), grant};
        send(m.candidate, "vote", [reply](RaftNode &n) { n.on_vote_reply(reply); });
    }

    void RaftNode::on_vote_reply(const VoteReply &m)
    {
        if (m.term > m_term)
        {
            become_follower(m.term);
            set_leader(std::nullopt);
            return;
        }
        if (m_role != Role::Candidate || m.term != m_term || !m.granted)
        {
            return;
        }
        m_votes.insert(m.from);
        if (m_votes.size() >= quorum())
        {
            become_leader();
        }
    }

    void RaftNode::become_follower(std::uint64_t term)
    {
        const bool was_leader = m_role == Role::Leader;
        if (term > m_term)
        {
            m_term = term;
            m_voted_for.reset();
        }
        m_role = Role::Follower;
        m_votes.clear();
        if (was_leader)
        {
            ++m_heartbeat_gen;
            m_switching = false;
            trace(TraceKind::SteppedDown);
            for (const auto &[index, rid] : m_pending_replies)
            {
                redirect_client(rid, std::nullopt);
            }
            m_pending_replies.clear();
        }
        reset_election_timer();
    }

    void RaftNode::set_leader(std::optional<NodeId> leader)
    {
        if (leader == m_leader)
        {
            return;
        }
        m_leader = leader;
        if (!leader || *leader == id())
        {
            return;
        }
        auto held = std::move(m_held);
        m_held.clear();
        for (auto &r : held)
        {
            route(std::move(r));
        }
        if (m_follower_gc.on_leader_change())
        {
            ask_leader();
        }
    }

    void RaftNode::become_leader()
    {
        m_role = Role::Leader;
        m_leader = id();
        ++m_election_gen;
        m_votes.clear();
        m_switching = false;
        std::fill(m_next.begin(), m_next.end(), last_index() + 1);
        std::fill(m_match.begin(), m_match.end(), 0);
        m_ledger.on_leader_change();
        trace(TraceKind::BecameLeader);

        std::optional<LeaderSwitch> carried;
        if (m_carried && m_carried->new_term == m_term)
        {
            carried = std::move(m_carried);
        }
        m_carried.reset();
        if (carried)
        {
            for (NodeId c : carried->collecting)
            {
                m_ledger.adopt(c);
            }
        }

        m_log.push_back({m_term, 0, {}, {}});
        m_match[id().value] = last_index();
        if (carried)
        {
            for (const auto &p : carried->pending)
            {
                if (p.index <= m_applied)
                {
                    reply_to_client(p.request_id);
                }
                else
                {
                    m_pending_replies[p.index] = p.request_id;
                }
            }
        }

        const NodeId me = id();
        const std::uint64_t term = m_term;
        m_cluster.network().send(me, m_cluster.client_id(), "leader-notice",
                                 [&cl = m_cluster, me, term] { cl.client_notice(me, term); });
        replicate_all();
        const std::uint64_t gen = ++m_heartbeat_gen;
        m_host->after(m_cfg.heartbeat, "heartbeat", [this, gen] { heartbeat_tick(gen); });
        advance_commit();

        if (carried)
        {
            for (auto &r : carried->forwarded)
            {
                process(std::move(r));
            }
        }
        auto held = std::move(m_held);
        m_held.clear();
        for (auto &r : held)
        {
            process(std::move(r));
        }
        if (m_follower_gc.req_in_flight() != 0)
        {
            ask_leader();
        }
    }

    void RaftNode::heartbeat_tick(std::uint64_t gen)
    {
        if (gen != m_heartbeat_gen || m_role != Role::Leader)
        {
            return;
        }
        replicate_all();
        m_host->after(m_cfg.heartbeat, "heartbeat", [this, gen] { heartbeat_tick(gen); });
    }

    // ---- client requests ----

    void RaftNode::on_client_request(ClientRequest req)
    {
        route(std::move(req));
    }

    void RaftNode::route(ClientRequest req)
    {
        if (m_role == Role::Leader)
        {
            if (m_switching)
            {
                m_held.push_back(std::move(req));
            }
            else
            {
                process(std::move(req));
            }
            return;
        }
        if (m_leader && *m_leader != id())
        {
            if (m_cfg.client_handling == ClientHandling::Redirect)
            {
                redirect_client(req.request_id, m_leader);
            }
            else if (req.hops >= m_n)
            {
                m_held.push_back(std::move(req));
            }
            else
            {
                ++req.hops;
                send(*m_leader, "proxy", [req](RaftNode &n) { n.on_client_request(req); });
            }
            return;
        }
        if (m_cfg.client_handling == ClientHandling::Redirect)
        {
            redirect_client(req.request_id, std::nullopt);
        }
        else
        {
            m_held.push_back(std::move(req));
        }
    }

    void RaftNode::process(ClientRequest req)
    {
        m_host->processor().submit(
            m_cfg.service_time,
            [this]
            {
                if (m_cfg.bytes_per_request > 0)
                {
                    m_host->runtime().allocate(m_cfg.bytes_per_request);
                }
            },
            [this, req = std::move(req)] { finish_request(req); });
    }

    void RaftNode::finish_request(const ClientRequest &req)
    {
        if (m_role != Role::Leader)
        {
            route(req);
            return;
        }
        if (req.kind == metrics::RequestKind::Set)
        {
            m_log.push_back({m_term, req.request_id, req.key, req.value});
            m_match[id().value] = last_index();
            m_pending_replies[last_index()] = req.request_id;
            replicate_all();
            advance_commit();
        }
        else
        {
            reply_to_client(req.request_id);
        }
        check_switch_ready();
    }

    void RaftNode::reply_to_client(std::uint64_t request_id)
    {
        const NodeId me = id();
        m_cluster.network().send(me, m_cluster.client_id(), "reply",
                                 [&cl = m_cluster, request_id, me] { cl.client_reply(request_id, me); });
    }

    void RaftNode::redirect_client(std::uint64_t request_id, std::optional<NodeId> leader)
    {
        m_cluster.network().send(id(), m_cluster.client_id(), "redirect",
                                 [&cl = m_cluster, request_id, leader] { cl.client_redirect(request_id, leader); });
    }

    // ---- replication ----

    void RaftNode::replicate_all()
    {
        for (std::size_t p = 0; p < m_n; ++p)
        {
            if (p != id().value)
            {
                send_append(p);
            }
        }
    }

    void RaftNode::send_append(std::size_t peer)
    {
        AppendEntries m;
        m.term = m_term;
        m.leader = id();
        m.prev_index = m_next[peer] - 1;
        m.prev_term = term_at(m.prev_index);
        const std::uint64_t end = std::min<std::uint64_t>(last_index(), m.prev_index + m_cfg.max_batch);
        m.entries.assign(m_log.begin() + static_cast<std::ptrdiff_t>(m.prev_index + 1),
                         m_log.begin() + static_cast<std::ptrdiff_t>(end + 1));
        m.leader_commit = m_commit;
        send(NodeId{static_cast<std::uint32_t>(peer)}, "append", [m = std::move(m)](RaftNode &n) { n.on_append(m); });
    }

    void RaftNode::on_append(const AppendEntries &m)
    {
        auto reply = [this, &m](bool ok, std::uint64_t match)
        {
            const AppendReply r{m_term, id(), ok, match, last_index()};
            send(m.leader, "append-reply", [r](RaftNode &n) { n.on_append_reply(r); });
        };
        if (m.term < m_term)
        {
            reply(false, 0);
            return;
        }
        if (m.term > m_term || m_role != Role::Follower)
        {
            become_follower(m.term);
        }
        else
        {
            reset_election_timer();
        }
        set_leader(m.leader);
        if (m.prev_index > last_index() || term_at(m.prev_index) != m.prev_term)
        {
            reply(false, 0);
            return;
        }
        std::uint64_t index = m.prev_index;
        std::size_t fresh = 0;
        for (const auto &e : m.entries)
        {
            ++index;
            if (index <= last_index())
            {
                if (term_at(index) == e.term)
                {
                    continue;
                }
                if (index <= m_commit)
                {
                    throw std::logic_error("raft: leader overwrote a committed entry");
                }
                m_log.resize(index);
            }
            m_log.push_back(e);
            if (!e.noop())
            {
                ++fresh;
            }
        }
        const std::uint64_t match = m.prev_index + m.entries.size();
        if (m.leader_commit > m_commit)
        {
            m_commit = std::max(m_commit, std::min(m.leader_commit, match));
            apply_committed();
        }
        reply(true, match);
        if (fresh > 0 && m_cfg.bytes_per_request > 0)
        {
            m_host->runtime().allocate(fresh * m_cfg.bytes_per_request);
        }
    }

    void RaftNode::on_append_reply(const AppendReply &m)
    {
        if (m.term > m_term)
        {
            become_follower(m.term);
            set_leader(std::nullopt);
            return;
        }
        if (m_role != Role::Leader || m.term != m_term)
        {
            return;
        }
        const std::size_t p = peer_index(m.from);
        if (m.success)
        {
            m_match[p] = std::max(m_match[p], m.match_index);
            m_next[p] = std::max(m_next[p], m_match[p] + 1);
            advance_commit();
            if (m_next[p] <= last_index())
            {
                send_append(p);
            }
            check_switch_ready();
        }
        else
        {
            m_next[p] = std::max<std::uint64_t>(1, std::min(m_next[p] - 1, m.last_index + 1));
            send_append(p);
        }
    }

    void RaftNode::advance_commit()
    {
        if (m_role != Role::Leader)
        {
            return;
        }
        for (std::uint64_t n = last_index(); n > m_commit; --n)
        {
            if (term_at(n) != m_term)
            {
                break;
            }
            const auto acks = static_cast<std::size_t>(
                std::count_if(m_match.begin(), m_match.end(), [n](std::uint64_t mi) { return mi >= n; }));
            if (acks >= quorum())
            {
                m_commit = n;
                apply_committed();
                break;
            }
        }
    }

    void RaftNode::apply_committed()
    {
        while (m_applied < m_commit)
        {
            ++m_applied;
            const LogEntry &e = m_log[m_applied];
            if (!e.noop())
            {
                m_kv[e.key] = e.value;
            }
            TraceEvent t;
            t.at = m_host->sim().now();
            t.kind = TraceKind::Applied;
            t.node = id();
            t.term = e.term;
            t.index = m_applied;
            t.request_id = e.request_id;
            t.role = m_role;
            m_cluster.record(t);
            if (m_role == Role::Leader)
            {
                if (auto it = m_pending_replies.find(m_applied); it != m_pending_replies.end())
                {
                    reply_to_client(it->second);
                    m_pending_replies.erase(it);
                }
            }
        }
    }

    // ---- collection scheduling ----

    bool RaftNode::on_upcall(const runtime::CollectionTicket &ticket)
    {
        if (ticket.estimated_pause <= m_cfg.defer_threshold)
        {
            return true;
        }
        m_gc_estimate = ticket.estimated_pause;
        m_host->after(sim::kZeroTime, "gc-request", [this, id = ticket.id] { request_collection(id); });
        return false;
    }

    void RaftNode::request_collection(std::uint64_t id)
    {
        const auto t = m_host->runtime().ticket(id);
        if (!t || t->state != runtime::TicketState::Deferred)
        {
            return;
        }
        m_follower_gc.on_gc_request(id);
        ask_leader();
    }

    void RaftNode::ask_leader()
    {
        const std::uint64_t gc = m_follower_gc.req_in_flight();
        if (gc == 0 || !m_leader)
        {
            return;
        }
        const AskGc ask{id(), gc, m_gc_estimate};
        if (*m_leader == id())
        {
            on_ask_gc(ask);
            return;
        }
        send(*m_leader, "ask-gc", [ask](RaftNode &n) { n.on_ask_gc(ask); });
    }

    void RaftNode::on_ask_gc(const AskGc &m)
    {
        if (m_role != Role::Leader)
        {
            return;
        }
        m_asks[m.from] = {m.id, m.estimated_pause, 0};
        execute(m_ledger.on_request(m.from));
    }

    void RaftNode::execute(const std::vector<LedgerAction> &actions)
    {
        for (const auto &action : actions)
        {
            if (const auto *s = std::get_if<SwitchLeader>(&action))
            {
                trace(TraceKind::GcGranted, 0, 0, id());
                begin_switch(s->successor_hint);
                continue;
            }
            const NodeId to = std::get<GrantGc>(action).to;
            auto &ask = m_asks[to];
            ask.epoch = ++m_grant_epoch;
            trace(TraceKind::GcGranted, 0, 0, to);
            const AllowGc allow{ask.id};
            send(to, "allow-gc", [allow](RaftNode &n) { n.on_allow_gc(allow); });
            const SimTime estimate = ask.estimate > sim::kZeroTime ? ask.estimate : m_host->runtime().config().default_pause;
            m_host->after(estimate * m_cfg.collection_timeout_factor, "gc-timeout",
                          [this, to, epoch = ask.epoch]
                          {
                              if (m_role == Role::Leader && m_asks[to].epoch == epoch && m_ledger.granted().contains(to))
                              {
                                  trace(TraceKind::GcReleased, 0, 0, to);
                                  execute(m_ledger.on_timeout(to));
                              }
                          });
        }
    }

    void RaftNode::on_allow_gc(const AllowGc &m)
    {
        if (m.id == m_follower_gc.req_in_flight())
        {
            m_follower_gc.on_gc_allowed(m.id);
        }
        start_granted_collection(m.id);
    }

    void RaftNode::start_granted_collection(std::uint64_t gc)
    {
        m_starting_granted = true;
        m_host->runtime().start_gc(gc,
                                   [this, gc]
                                   {
                                       const DoneGc done{id(), gc};
                                       if (m_role == Role::Leader)
                                       {
                                           on_done_gc(done);
                                       }
                                       else if (m_leader)
                                       {
                                           send(*m_leader, "done-gc", [done](RaftNode &n) { n.on_done_gc(done); });
                                       }
                                   });
        m_starting_granted = false;
    }

    void RaftNode::on_done_gc(const DoneGc &m)
    {
        if (m_role != Role::Leader)
        {
            if (!m.forwarded && m_leader && *m_leader != id())
            {
                DoneGc fwd = m;
                fwd.forwarded = true;
                send(*m_leader, "done-gc", [fwd](RaftNode &n) { n.on_done_gc(fwd); });
            }
            return;
        }
        trace(TraceKind::GcReleased, 0, 0, m.from);
        execute(m_ledger.on_finished(m.from));
    }

    void RaftNode::begin_switch(NodeId hint)
    {
        std::vector<NodeId> eligible;
        for (std::uint32_t p = 0; p < m_n; ++p)
        {
            const NodeId n{p};
            if (n != id() && !m_ledger.granted().contains(n))
            {
                eligible.push_back(n);
            }
        }
        if (eligible.empty())
        {
            // Nobody to hand over to: collect in place.
            const std::uint64_t gc = m_follower_gc.req_in_flight();
            m_follower_gc.on_gc_allowed(gc);
            start_granted_collection(gc);
            return;
        }
        NodeId successor = eligible.front();
        if (std::find(eligible.begin(), eligible.end(), hint) != eligible.end())
        {
            successor = hint;
        }
        else
        {
            std::uniform_int_distribution<std::size_t> pick(0, eligible.size() - 1);
            successor = eligible[pick(m_rng)];
        }
        m_switching = true;
        m_switch_target = successor;
        check_switch_ready();
    }

    void RaftNode::check_switch_ready()
    {
        if (!m_switching || m_role != Role::Leader)
        {
            return;
        }
        if (!m_host->processor().idle() || m_match[m_switch_target.value] < last_index())
        {
            return;
        }
        do_switch();
    }

    void RaftNode::do_switch()
    {
        const NodeId successor = m_switch_target;
        LeaderSwitch s;
        s.new_term = m_term + 1;
        s.old_leader = id();
        s.successor = successor;
        s.last_index = last_index();
        s.last_term = term_at(last_index());
        for (auto &r : m_held)
        {
            if (m_cfg.client_handling == ClientHandling::Proxy)
            {
                s.forwarded.push_back(std::move(r));
            }
            else
            {
                redirect_client(r.request_id, successor);
            }
        }
        m_held.clear();
        for (const auto &[index, rid] : m_pending_replies)
        {
            s.pending.push_back({index, rid});
        }
        m_pending_replies.clear();
        s.collecting.assign(m_ledger.granted().begin(), m_ledger.granted().end());
        trace(TraceKind::SwitchSent, 0, 0, successor);

        for (std::uint32_t p = 0; p < m_n; ++p)
        {
            if (p != id().value)
            {
                send(NodeId{p}, "leader-switch", [s](RaftNode &n) { n.on_switch(s); });
            }
        }
        const std::uint64_t term = s.new_term;
        m_cluster.network().send(id(), m_cluster.client_id(), "leader-notice",
                                 [&cl = m_cluster, successor, term] { cl.client_notice(successor, term); });

        const std::uint64_t gc = m_follower_gc.req_in_flight();
        m_follower_gc.on_gc_allowed(gc);
        m_switching = false;
        ++m_heartbeat_gen;
        m_role = Role::Follower;
        m_term = s.new_term;
        m_voted_for = successor;
        m_leader = successor;
        trace(TraceKind::SteppedDown, 0, 0, successor);
        reset_election_timer();

        const SimTime window = m_cfg.proxy_window.value_or(m_cluster.network().model().rtt());
        if (window <= sim::kZeroTime)
        {
            start_granted_collection(gc);
        }
        else
        {
            m_host->after(window, "gc-handoff", [this, gc] { start_granted_collection(gc); });
        }
    }

    void RaftNode::on_switch(const LeaderSwitch &m)
    {
        if (m.new_term < m_term)
        {
            return;
        }
        if (m.new_term == m_term && m_voted_for && *m_voted_for != m.successor)
        {
            return;
        }
        if (!up_to_date(m.last_term, m.last_index))
        {
            return;
        }
        if (m.new_term > m_term || m_role == Role::Leader)
        {
            become_follower(m.new_term);
        }
        m_voted_for = m.successor;
        if (m.successor == id())
        {
            m_role = Role::Candidate;
            m_votes = {id(), m.old_leader};
            m_carried = m;
            set_leader(std::nullopt);
            reset_election_timer();
            if (m_votes.size() >= quorum())
            {
                become_leader();
            }
            return;
        }
        reset_election_timer();
        set_leader(m.successor);
        const VoteReply vote{m_term, id(), true};
        send(m.successor, "vote", [vote](RaftNode &n) { n.on_vote_reply(vote); });
    }
}
