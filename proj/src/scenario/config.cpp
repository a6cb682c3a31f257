#include "blade/scenario/config.hpp"

#include <yaml-cpp/yaml.h>

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <regex>
#include <sstream>

namespace blade::scenario
{
    std::string_view to_string(SystemKind s) noexcept
    {
        return s == SystemKind::Raft ? "raft" : "http";
    }

    ConfigError::ConfigError(std::string field, std::size_t line, const std::string &message)
        : std::runtime_error((line > 0 ? "line " + std::to_string(line) + ": " : std::string{}) +
                             (field.empty() ? std::string{} : field + ": ") + message),
          m_field(std::move(field)), m_line(line)
    {
    }

    SimTime ScenarioConfig::effective_deadline() const
    {
        return deadline.value_or(workload.duration + SimTime::seconds(1));
    }

    ScenarioConfig default_config(SystemKind system)
    {
        ScenarioConfig c;
        c.system = system;
        if (system == SystemKind::Raft)
        {
            c.runtime.live_bytes = 200 * sim::kMiB;
            c.workload.rate_per_second = 100.0;
            c.workload.duration = SimTime::seconds(600);
            c.workload.http = false;
            c.bytes_per_request = 16 * sim::kKiB;
            c.background_rate = 2 * sim::kMiB;
            c.service_time = SimTime::micros(400);
            c.parallelism = 4;
        }
        else
        {
            c.runtime.live_bytes = 150 * sim::kMiB;
            c.workload.rate_per_second = 6000.0;
            c.workload.duration = SimTime::seconds(360);
            c.workload.http = true;
            c.bytes_per_request = 6554;
            c.background_rate = 0;
            c.service_time = SimTime::millis(2);
            c.parallelism = 8;
        }
        return c;
    }

    void validate(const ScenarioConfig &c)
    {
        auto fail = [](const char *field, const std::string &msg) { throw ConfigError(field, 0, msg); };
        if (c.nodes == 0)
        {
            fail("topology.nodes", "must be at least 1");
        }
        if (c.rtt < sim::kZeroTime)
        {
            fail("topology.rtt", "must not be negative");
        }
        if (c.jitter < sim::kZeroTime)
        {
            fail("topology.jitter", "must not be negative");
        }
        if (c.runtime.live_bytes == 0)
        {
            fail("runtime.live", "must be positive");
        }
        const auto heap = c.runtime.initial_heap();
        if (heap.trigger_bytes <= heap.live_bytes)
        {
            fail("runtime.trigger", "must exceed the live set");
        }
        if (heap.live_bytes > heap.hard_limit_bytes)
        {
            fail("runtime.hard_limit", "must hold the live set");
        }
        if (heap.trigger_bytes + heap.low_water_bytes > heap.hard_limit_bytes)
        {
            fail("runtime.low_water", "trigger plus low-water exceeds the hard limit");
        }
        if (c.runtime.cost.pause_per_gb < sim::kZeroTime)
        {
            fail("runtime.pause_per_gb", "must not be negative");
        }
        if (c.runtime.cost.fixed_overhead < sim::kZeroTime)
        {
            fail("runtime.fixed_overhead", "must not be negative");
        }
        if (c.runtime.default_pause < sim::kZeroTime)
        {
            fail("runtime.default_pause", "must not be negative");
        }
        if (c.defer_threshold < sim::kZeroTime)
        {
            fail("runtime.defer_threshold", "must not be negative");
        }
        if (!(c.workload.rate_per_second > 0.0) || !std::isfinite(c.workload.rate_per_second))
        {
            fail("workload.rate", "must be positive");
        }
        if (c.workload.duration <= sim::kZeroTime)
        {
            fail("workload.duration", "must be positive");
        }
        if (c.system == SystemKind::Raft && c.workload.gets + c.workload.sets == 0)
        {
            fail("workload.mix", "needs at least one get or set");
        }
        if (c.service_time <= sim::kZeroTime)
        {
            fail("server.service_time", "must be positive");
        }
        if (c.parallelism == 0)
        {
            fail("server.parallelism", "must be at least 1");
        }
        if (c.max_concurrent == 0)
        {
            fail("coordinator.max_concurrent", "must be at least 1");
        }
        if (c.raft.election_timeout_min <= sim::kZeroTime)
        {
            fail("raft.election_timeout_min", "must be positive");
        }
        if (c.raft.election_timeout_max < c.raft.election_timeout_min)
        {
            fail("raft.election_timeout_max", "must not be below the minimum");
        }
        if (c.raft.heartbeat <= sim::kZeroTime || c.raft.heartbeat >= c.raft.election_timeout_min)
        {
            fail("raft.heartbeat", "must be positive and below the election timeout");
        }
        if (c.raft.proxy_window && *c.raft.proxy_window < sim::kZeroTime)
        {
            fail("raft.proxy_window", "must not be negative");
        }
        if (c.raft.collection_timeout_factor < 1)
        {
            fail("raft.collection_timeout_factor", "must be at least 1");
        }
        if (c.deadline && *c.deadline <= sim::kZeroTime)
        {
            fail("deadline", "must be positive");
        }
    }

    namespace
    {
        const std::regex &quantity_re()
        {
            static const std::regex re(R"(^\s*(-?[0-9]+(?:\.[0-9]+)?)\s*([A-Za-z]*)\s*$)");
            return re;
        }
    }

    SimTime parse_duration(const std::string &text, const std::string &field, std::size_t line)
    {
        std::smatch m;
        if (!std::regex_match(text, m, quantity_re()))
        {
            throw ConfigError(field, line, "expected a duration such as 48us, 10ms or 2s");
        }
        double v = 0.0;
        const std::string num = m[1].str();
        std::from_chars(num.data(), num.data() + num.size(), v);
        const std::string unit = m[2].str();
        double scale = 0.0;
        if (unit == "us")
        {
            scale = 1.0;
        }
        else if (unit == "ms")
        {
            scale = 1e3;
        }
        else if (unit == "s")
        {
            scale = 1e6;
        }
        else if (unit.empty() && v == 0.0)
        {
            scale = 1.0;
        }
        else
        {
            throw ConfigError(field, line, "unknown or missing time unit in '" + text + "'");
        }
        return SimTime::micros(std::llround(v * scale));
    }

    namespace
    {
        std::size_t line_of(const YAML::Node &n)
        {
            return static_cast<std::size_t>(n.Mark().line) + 1;
        }

        std::string scalar(const YAML::Node &n, const std::string &field)
        {
            if (!n.IsScalar())
            {
                throw ConfigError(field, line_of(n), "expected a scalar value");
            }
            return n.Scalar();
        }

        double number(const std::string &text, const std::string &field, std::size_t line)
        {
            double v = 0.0;
            const char *end = text.data() + text.size();
            auto [p, ec] = std::from_chars(text.data(), end, v);
            if (ec != std::errc{} || p != end)
            {
                throw ConfigError(field, line, "not a number: '" + text + "'");
            }
            return v;
        }

        std::uint64_t unsigned_value(const YAML::Node &n, const std::string &field)
        {
            const auto text = scalar(n, field);
            std::uint64_t v = 0;
            const char *end = text.data() + text.size();
            auto [p, ec] = std::from_chars(text.data(), end, v);
            if (ec != std::errc{} || p != end)
            {
                throw ConfigError(field, line_of(n), "expected a non-negative integer, got '" + text + "'");
            }
            return v;
        }

        SimTime duration(const YAML::Node &n, const std::string &field)
        {
            return parse_duration(scalar(n, field), field, line_of(n));
        }

        Bytes bytes(const YAML::Node &n, const std::string &field)
        {
            const auto text = scalar(n, field);
            std::smatch m;
            if (!std::regex_match(text, m, quantity_re()))
            {
                throw ConfigError(field, line_of(n), "expected a size such as 6554, 16KB or 150MB");
            }
            const double v = number(m[1].str(), field, line_of(n));
            if (v < 0.0)
            {
                throw ConfigError(field, line_of(n), "must not be negative");
            }
            const std::string unit = m[2].str();
            double scale = 0.0;
            if (unit.empty() || unit == "B")
            {
                scale = 1.0;
            }
            else if (unit == "KB")
            {
                scale = static_cast<double>(sim::kKiB);
            }
            else if (unit == "MB")
            {
                scale = static_cast<double>(sim::kMiB);
            }
            else if (unit == "GB")
            {
                scale = static_cast<double>(sim::kGiB);
            }
            else
            {
                throw ConfigError(field, line_of(n), "unknown size unit in '" + text + "'");
            }
            return static_cast<Bytes>(std::llround(v * scale));
        }

        using Setter = std::function<void(ScenarioConfig &, const YAML::Node &, const std::string &)>;
        using Section = std::map<std::string, Setter>;

        std::map<std::string, Section> schema()
        {
            std::map<std::string, Section> s;
            s["topology"] = {
                {"system", [](ScenarioConfig &, const YAML::Node &, const std::string &) {}},
                {"nodes", [](auto &c, auto &n, auto &f) { c.nodes = unsigned_value(n, f); }},
                {"rtt", [](auto &c, auto &n, auto &f) { c.rtt = duration(n, f); }},
                {"jitter", [](auto &c, auto &n, auto &f) { c.jitter = duration(n, f); }},
            };
            s["runtime"] = {
                {"live", [](auto &c, auto &n, auto &f) { c.runtime.live_bytes = bytes(n, f); }},
                {"trigger", [](auto &c, auto &n, auto &f) { c.runtime.trigger_bytes = bytes(n, f); }},
                {"hard_limit", [](auto &c, auto &n, auto &f) { c.runtime.hard_limit_bytes = bytes(n, f); }},
                {"low_water", [](auto &c, auto &n, auto &f) { c.runtime.low_water_bytes = bytes(n, f); }},
                {"pause_per_gb", [](auto &c, auto &n, auto &f) { c.runtime.cost.pause_per_gb = duration(n, f); }},
                {"fixed_overhead", [](auto &c, auto &n, auto &f) { c.runtime.cost.fixed_overhead = duration(n, f); }},
                {"default_pause", [](auto &c, auto &n, auto &f) { c.runtime.default_pause = duration(n, f); }},
                {"defer_threshold", [](auto &c, auto &n, auto &f) { c.defer_threshold = duration(n, f); }},
            };
            s["workload"] = {
                {"rate", [](auto &c, auto &n, auto &f) { c.workload.rate_per_second = number(scalar(n, f), f, line_of(n)); }},
                {"duration", [](auto &c, auto &n, auto &f) { c.workload.duration = duration(n, f); }},
                {"mix",
                 [](auto &c, auto &n, auto &f)
                 {
                     const auto text = scalar(n, f);
                     static const std::regex re(R"(^\s*([0-9]+)\s*:\s*([0-9]+)\s*$)");
                     std::smatch m;
                     if (!std::regex_match(text, m, re))
                     {
                         throw ConfigError(f, line_of(n), "expected gets:sets such as 3:1");
                     }
                     c.workload.gets = static_cast<std::uint32_t>(std::stoul(m[1].str()));
                     c.workload.sets = static_cast<std::uint32_t>(std::stoul(m[2].str()));
                 }},
                {"arrivals",
                 [](auto &c, auto &n, auto &f)
                 {
                     const auto text = scalar(n, f);
                     if (text == "uniform")
                     {
                         c.workload.arrivals = metrics::ArrivalProcess::Uniform;
                     }
                     else if (text == "poisson")
                     {
                         c.workload.arrivals = metrics::ArrivalProcess::Poisson;
                     }
                     else
                     {
                         throw ConfigError(f, line_of(n), "expected uniform or poisson");
                     }
                 }},
                {"order",
                 [](auto &c, auto &n, auto &f)
                 {
                     const auto text = scalar(n, f);
                     if (text == "interleaved")
                     {
                         c.workload.order = metrics::MixOrder::Interleaved;
                     }
                     else if (text == "random")
                     {
                         c.workload.order = metrics::MixOrder::Random;
                     }
                     else
                     {
                         throw ConfigError(f, line_of(n), "expected interleaved or random");
                     }
                 }},
                {"bytes_per_request", [](auto &c, auto &n, auto &f) { c.bytes_per_request = bytes(n, f); }},
                {"background_rate", [](auto &c, auto &n, auto &f) { c.background_rate = bytes(n, f); }},
                {"seed", [](auto &c, auto &n, auto &f) { c.workload.seed = unsigned_value(n, f); }},
            };
            s["server"] = {
                {"service_time", [](auto &c, auto &n, auto &f) { c.service_time = duration(n, f); }},
                {"parallelism", [](auto &c, auto &n, auto &f) { c.parallelism = unsigned_value(n, f); }},
            };
            s["coordinator"] = {
                {"max_concurrent", [](auto &c, auto &n, auto &f) { c.max_concurrent = unsigned_value(n, f); }},
            };
            s["raft"] = {
                {"election_timeout_min", [](auto &c, auto &n, auto &f) { c.raft.election_timeout_min = duration(n, f); }},
                {"election_timeout_max", [](auto &c, auto &n, auto &f) { c.raft.election_timeout_max = duration(n, f); }},
                {"heartbeat", [](auto &c, auto &n, auto &f) { c.raft.heartbeat = duration(n, f); }},
                {"client_handling",
                 [](auto &c, auto &n, auto &f)
                 {
                     const auto text = scalar(n, f);
                     if (text == "proxy")
                     {
                         c.raft.client_handling = raft::ClientHandling::Proxy;
                     }
                     else if (text == "redirect")
                     {
                         c.raft.client_handling = raft::ClientHandling::Redirect;
                     }
                     else
                     {
                         throw ConfigError(f, line_of(n), "expected proxy or redirect");
                     }
                 }},
                {"proxy_window", [](auto &c, auto &n, auto &f) { c.raft.proxy_window = duration(n, f); }},
                {"collection_timeout_factor",
                 [](auto &c, auto &n, auto &f)
                 { c.raft.collection_timeout_factor = static_cast<std::int64_t>(unsigned_value(n, f)); }},
            };
            return s;
        }

        SystemKind parse_system(const YAML::Node &root)
        {
            const YAML::Node topo = root["topology"];
            if (!topo || !topo.IsMap() || !topo["system"])
            {
                return SystemKind::Raft;
            }
            const YAML::Node n = topo["system"];
            const auto text = scalar(n, "topology.system");
            if (text == "raft")
            {
                return SystemKind::Raft;
            }
            if (text == "http")
            {
                return SystemKind::Http;
            }
            throw ConfigError("topology.system", line_of(n), "expected raft or http");
        }
    }

    ScenarioConfig parse_config(std::string_view text)
    {
        YAML::Node root;
        try
        {
            root = YAML::Load(std::string(text));
        }
        catch (const YAML::ParserException &e)
        {
            throw ConfigError("", static_cast<std::size_t>(e.mark.line) + 1, e.msg);
        }
        if (!root || root.IsNull())
        {
            auto c = default_config(SystemKind::Raft);
            validate(c);
            return c;
        }
        if (!root.IsMap())
        {
            throw ConfigError("", line_of(root), "top level must be a mapping");
        }

        ScenarioConfig c = default_config(parse_system(root));
        std::map<std::string, std::size_t> lines;
        const auto sections = schema();
        for (const auto &kv : root)
        {
            const std::string key = kv.first.as<std::string>();
            const YAML::Node &value = kv.second;
            if (key == "gc_mode")
            {
                const auto mode = runtime::parse_gc_mode(scalar(value, key));
                if (!mode)
                {
                    throw ConfigError(key, line_of(value), "expected on, off or blade");
                }
                c.mode = *mode;
                continue;
            }
            if (key == "deadline")
            {
                c.deadline = duration(value, key);
                lines[key] = line_of(value);
                continue;
            }
            auto sec = sections.find(key);
            if (sec == sections.end())
            {
                throw ConfigError(key, line_of(kv.first), "unknown key");
            }
            if (value.IsNull())
            {
                continue;
            }
            if (!value.IsMap())
            {
                throw ConfigError(key, line_of(value), "expected a mapping");
            }
            for (const auto &field : value)
            {
                const std::string name = field.first.as<std::string>();
                const std::string full = key + "." + name;
                auto setter = sec->second.find(name);
                if (setter == sec->second.end())
                {
                    throw ConfigError(full, line_of(field.first), "unknown key");
                }
                setter->second(c, field.second, full);
                lines[full] = line_of(field.second);
            }
        }
        try
        {
            validate(c);
        }
        catch (const ConfigError &e)
        {
            auto it = lines.find(e.field());
            if (it == lines.end())
            {
                throw;
            }
            const std::string what = e.what();
            throw ConfigError(e.field(), it->second, what.substr(e.field().size() + 2));
        }
        return c;
    }

    ScenarioConfig load_config(const std::filesystem::path &path)
    {
        std::ifstream in(path, std::ios::binary);
        if (!in)
        {
            throw ConfigError("", 0, "cannot open " + path.string());
        }
        std::ostringstream text;
        text << in.rdbuf();
        return parse_config(text.str());
    }

    namespace
    {
        std::string time_text(SimTime t)
        {
            const auto us = t.count();
            if (us != 0 && us % 1'000'000 == 0)
            {
                return std::to_string(us / 1'000'000) + "s";
            }
            if (us != 0 && us % 1000 == 0)
            {
                return std::to_string(us / 1000) + "ms";
            }
            return std::to_string(us) + "us";
        }

        std::string bytes_text(Bytes b)
        {
            if (b != 0 && b % sim::kGiB == 0)
            {
                return std::to_string(b / sim::kGiB) + "GB";
            }
            if (b != 0 && b % sim::kMiB == 0)
            {
                return std::to_string(b / sim::kMiB) + "MB";
            }
            if (b != 0 && b % sim::kKiB == 0)
            {
                return std::to_string(b / sim::kKiB) + "KB";
            }
            return std::to_string(b);
        }

        std::string double_text(double v)
        {
            char buf[64];
            auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
            return std::string(buf, p);
        }
    }

    std::string serialize_config(const ScenarioConfig &c)
    {
        const auto heap = c.runtime.initial_heap();
        std::ostringstream o;
        o << "topology:\n"
          << "  system: " << to_string(c.system) << "\n"
          << "  nodes: " << c.nodes << "\n"
          << "  rtt: " << time_text(c.rtt) << "\n"
          << "  jitter: " << time_text(c.jitter) << "\n"
          << "runtime:\n"
          << "  live: " << bytes_text(heap.live_bytes) << "\n"
          << "  trigger: " << bytes_text(heap.trigger_bytes) << "\n"
          << "  hard_limit: " << bytes_text(heap.hard_limit_bytes) << "\n"
          << "  low_water: " << bytes_text(heap.low_water_bytes) << "\n"
          << "  pause_per_gb: " << time_text(c.runtime.cost.pause_per_gb) << "\n"
          << "  fixed_overhead: " << time_text(c.runtime.cost.fixed_overhead) << "\n"
          << "  default_pause: " << time_text(c.runtime.default_pause) << "\n"
          << "  defer_threshold: " << time_text(c.defer_threshold) << "\n"
          << "workload:\n"
          << "  rate: " << double_text(c.workload.rate_per_second) << "\n"
          << "  duration: " << time_text(c.workload.duration) << "\n"
          << "  mix: \"" << c.workload.gets << ":" << c.workload.sets << "\"\n"
          << "  arrivals: " << (c.workload.arrivals == metrics::ArrivalProcess::Uniform ? "uniform" : "poisson") << "\n"
          << "  order: " << (c.workload.order == metrics::MixOrder::Interleaved ? "interleaved" : "random") << "\n"
          << "  bytes_per_request: " << bytes_text(c.bytes_per_request) << "\n"
          << "  background_rate: " << bytes_text(c.background_rate) << "\n"
          << "  seed: " << c.workload.seed << "\n"
          << "gc_mode: " << (c.mode == GcMode::On ? "on" : c.mode == GcMode::Off ? "off" : "blade") << "\n"
          << "server:\n"
          << "  service_time: " << time_text(c.service_time) << "\n"
          << "  parallelism: " << c.parallelism << "\n"
          << "coordinator:\n"
          << "  max_concurrent: " << c.max_concurrent << "\n"
          << "raft:\n"
          << "  election_timeout_min: " << time_text(c.raft.election_timeout_min) << "\n"
          << "  election_timeout_max: " << time_text(c.raft.election_timeout_max) << "\n"
          << "  heartbeat: " << time_text(c.raft.heartbeat) << "\n"
          << "  client_handling: " << (c.raft.client_handling == raft::ClientHandling::Proxy ? "proxy" : "redirect")
          << "\n"
          << "  proxy_window: " << time_text(c.raft.proxy_window.value_or(c.rtt)) << "\n"
          << "  collection_timeout_factor: " << c.raft.collection_timeout_factor << "\n"
          << "deadline: " << time_text(c.effective_deadline()) << "\n";
        return o.str();
    }

    http::HttpClusterConfig to_http(const ScenarioConfig &c)
    {
        http::HttpClusterConfig h;
        h.backends = c.nodes;
        h.network = sim::NetworkModel::from_rtt(c.rtt, c.jitter);
        h.runtime = c.runtime;
        h.mode = c.mode;
        h.service_time = c.service_time;
        h.parallelism = c.parallelism;
        h.max_concurrent = c.max_concurrent;
        h.bytes_per_request = c.bytes_per_request;
        h.background_rate = c.background_rate;
        h.defer_threshold = c.defer_threshold;
        h.seed = c.workload.seed;
        return h;
    }

    raft::RaftClusterConfig to_raft(const ScenarioConfig &c)
    {
        raft::RaftClusterConfig r;
        r.nodes = c.nodes;
        r.network = sim::NetworkModel::from_rtt(c.rtt, c.jitter);
        r.runtime = c.runtime;
        r.mode = c.mode;
        r.raft = c.raft;
        r.raft.service_time = c.service_time;
        r.raft.parallelism = c.parallelism;
        r.raft.bytes_per_request = c.bytes_per_request;
        r.raft.defer_threshold = c.defer_threshold;
        r.background_rate = c.background_rate;
        r.seed = c.workload.seed;
        return r;
    }
}
