#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <string>

namespace blade::sim
{
    /// Virtual time in whole microseconds. Used both for instants and for durations.
    class SimTime
    {
    public:
        constexpr SimTime() noexcept = default;

        static constexpr SimTime micros(std::int64_t us) noexcept { return SimTime{us}; }
        static constexpr SimTime millis(std::int64_t ms) noexcept { return SimTime{ms * 1000}; }
        static constexpr SimTime seconds(std::int64_t s) noexcept { return SimTime{s * 1'000'000}; }
        static SimTime from_millis(double ms) noexcept;

        constexpr std::int64_t count() const noexcept { return m_us; }
        constexpr double as_millis() const noexcept { return static_cast<double>(m_us) / 1000.0; }

        constexpr auto operator<=>(const SimTime &) const noexcept = default;

        constexpr SimTime &operator+=(SimTime o) noexcept
        {
            m_us += o.m_us;
            return *this;
        }
        constexpr SimTime &operator-=(SimTime o) noexcept
        {
            m_us -= o.m_us;
            return *this;
        }
        friend constexpr SimTime operator+(SimTime a, SimTime b) noexcept { return SimTime{a.m_us + b.m_us}; }
        friend constexpr SimTime operator-(SimTime a, SimTime b) noexcept { return SimTime{a.m_us - b.m_us}; }
        friend constexpr SimTime operator*(SimTime a, std::int64_t k) noexcept { return SimTime{a.m_us * k}; }
        friend constexpr SimTime operator*(std::int64_t k, SimTime a) noexcept { return SimTime{a.m_us * k}; }
        friend constexpr SimTime operator/(SimTime a, std::int64_t k) noexcept { return SimTime{a.m_us / k}; }

        std::string to_string() const;

    private:
        constexpr explicit SimTime(std::int64_t us) noexcept : m_us(us) {}

        std::int64_t m_us = 0;
    };

    inline constexpr SimTime kZeroTime = SimTime::micros(0);

    /// Cluster-wide node identifier. Dense, assigned by the network in registration order.
    struct NodeId
    {
        std::uint32_t value = 0;

        constexpr auto operator<=>(const NodeId &) const noexcept = default;
    };

    using Bytes = std::uint64_t;

    inline constexpr Bytes kKiB = 1024;
    inline constexpr Bytes kMiB = 1024 * kKiB;
    inline constexpr Bytes kGiB = 1024 * kMiB;
}

template <>
struct std::hash<blade::sim::NodeId>
{
    std::size_t operator()(blade::sim::NodeId id) const noexcept { return std::hash<std::uint32_t>{}(id.value); }
};
