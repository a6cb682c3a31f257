#include "blade/sim/network.hpp"

#include <stdexcept>
#include <string>
#include <utility>

namespace blade::sim
{
    Network::Network(Simulator &sim, NetworkModel model)
        : m_sim(sim), m_model(model), m_jitter_rng(sim.seed() ^ 0x9e3779b97f4a7c15ULL)
    {
        if (model.one_way_delay < kZeroTime || model.jitter < kZeroTime)
        {
            throw std::invalid_argument("Network: negative delay");
        }
    }

    NodeId Network::add_node(DeliveryGate gate)
    {
        m_gates.push_back(std::move(gate));
        return NodeId{static_cast<std::uint32_t>(m_gates.size() - 1)};
    }

    void Network::set_gate(NodeId node, DeliveryGate gate)
    {
        m_gates.at(node.value) = std::move(gate);
    }

    void Network::send(NodeId from, NodeId to, const char *label, Action on_delivery)
    {
        if (!contains(from) || !contains(to))
        {
            throw std::out_of_range("Network::send: unknown node " +
                                    std::to_string(contains(from) ? to.value : from.value));
        }
        SimTime delay = m_model.one_way_delay;
        if (m_model.jitter > kZeroTime)
        {
            std::uniform_int_distribution<std::int64_t> extra(0, m_model.jitter.count());
            delay += SimTime::micros(extra(m_jitter_rng));
        }
        ++m_sent;
        m_sim.schedule(m_sim.now() + delay, to, label,
                       [this, to, action = std::move(on_delivery)]() mutable
                       {
                           const auto &gate = m_gates[to.value];
                           if (gate)
                           {
                               gate(std::move(action));
                           }
                           else
                           {
                               action();
                           }
                       });
    }
}
