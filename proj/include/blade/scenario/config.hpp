#pragma once

#include "blade/http/http_cluster.hpp"
#include "blade/metrics/workload.hpp"
#include "blade/raft/raft_cluster.hpp"
#include "blade/runtime/gc_mode.hpp"

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace blade::scenario
{
    using runtime::GcMode;
    using sim::Bytes;
    using sim::SimTime;

    enum class SystemKind
    {
        Raft,
        Http,
    };

    std::string_view to_string(SystemKind s) noexcept;

    /// Parse or validation failure; line is 0 when no source position applies.
    class ConfigError : public std::runtime_error
    {
    public:
        ConfigError(std::string field, std::size_t line, const std::string &message);

        const std::string &field() const noexcept { return m_field; }
        std::size_t line() const noexcept { return m_line; }

    private:
        std::string m_field;
        std::size_t m_line;
    };

    struct ScenarioConfig
    {
        SystemKind system = SystemKind::Raft;
        /// Raft servers or HTTP backends.
        std::size_t nodes = 3;
        SimTime rtt = SimTime::micros(48);
        SimTime jitter;

        runtime::RuntimeConfig runtime;
        SimTime defer_threshold = SimTime::millis(1);

        metrics::WorkloadConfig workload;
        Bytes bytes_per_request = 0;
        /// Bytes per second per node, independent of requests.
        Bytes background_rate = 0;

        GcMode mode = GcMode::Blade;

        SimTime service_time;
        std::size_t parallelism = 1;

        std::size_t max_concurrent = 1;

        raft::RaftConfig raft;

        /// Unset: one second past the end of the arrival stream.
        std::optional<SimTime> deadline;

        SimTime effective_deadline() const;
    };

    /// Defaults for `system`; trigger and low-water are left to the runtime's rules.
    ScenarioConfig default_config(SystemKind system);

    /// Throws ConfigError naming the offending field.
    void validate(const ScenarioConfig &config);

    /// YAML text; an empty document yields the Raft defaults. Unknown keys are rejected.
    ScenarioConfig parse_config(std::string_view text);
    ScenarioConfig load_config(const std::filesystem::path &path);

    /// "48us", "10ms", "2.5s"; a bare 0 is accepted.
    SimTime parse_duration(const std::string &text, const std::string &field = "duration", std::size_t line = 0);

    /// Canonical YAML with every field explicit.
    std::string serialize_config(const ScenarioConfig &config);

    http::HttpClusterConfig to_http(const ScenarioConfig &config);
    raft::RaftClusterConfig to_raft(const ScenarioConfig &config);
}
