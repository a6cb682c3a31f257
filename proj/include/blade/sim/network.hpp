#pragma once

#include "blade/sim/simulator.hpp"

#include <optional>
#include <random>
#include <vector>

namespace blade::sim
{
    struct NetworkModel
    {
        SimTime one_way_delay = SimTime::micros(24);
        /// Upper bound of a uniform additive delay; zero disables jitter.
        SimTime jitter = kZeroTime;

        static NetworkModel from_rtt(SimTime rtt, SimTime jitter = kZeroTime) { return {rtt / 2, jitter}; }
        SimTime rtt() const noexcept { return one_way_delay * 2; }
    };

    /// A gate decides when a delivered action actually runs at the receiver
    /// (for example, a stopped-the-world process buffers until it wakes).
    using DeliveryGate = std::function<void(Action)>;

    /// Point-to-point message delivery with a fixed one-way delay.
    class Network
    {
    public:
        Network(Simulator &sim, NetworkModel model);

        NodeId add_node(DeliveryGate gate = {});
        void set_gate(NodeId node, DeliveryGate gate);
        std::size_t node_count() const noexcept { return m_gates.size(); }
        bool contains(NodeId node) const noexcept { return node.value < m_gates.size(); }

        /// Schedules on_delivery at the receiver. Throws std::out_of_range for unknown nodes.
        void send(NodeId from, NodeId to, const char *label, Action on_delivery);

        const NetworkModel &model() const noexcept { return m_model; }
        Simulator &simulator() noexcept { return m_sim; }
        std::uint64_t messages_sent() const noexcept { return m_sent; }

    private:
        Simulator &m_sim;
        NetworkModel m_model;
        std::vector<DeliveryGate> m_gates;
        std::mt19937_64 m_jitter_rng;
        std::uint64_t m_sent = 0;
    };
}
