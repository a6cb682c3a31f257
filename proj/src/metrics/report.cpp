#include "blade/metrics/report.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace blade::metrics
{
    namespace
    {
        std::string ms(double micros)
        {
            char buf[64];
            std::snprintf(buf, sizeof buf, "%.3f", micros / 1000.0);
            return buf;
        }

        std::string ms(SimTime t) { return ms(static_cast<double>(t.count())); }

        void write_file(const std::filesystem::path &path, const std::string &body)
        {
            std::ofstream out(path, std::ios::binary | std::ios::trunc);
            if (!out)
            {
                throw std::runtime_error("cannot write " + path.string());
            }
            out << body;
            if (!out.flush())
            {
                throw std::runtime_error("short write to " + path.string());
            }
        }
    }

    ConfigSummary summarize(std::string name, std::span<const LatencySample> samples,
                            std::span<const PauseInterval> pauses, std::size_t in_flight)
    {
        ConfigSummary s;
        s.name = std::move(name);
        if (!samples.empty())
        {
            s.latency = percentiles(samples);
        }
        s.collections = pauses.size();
        if (!pauses.empty())
        {
            double total = 0.0;
            for (const auto &p : pauses)
            {
                total += static_cast<double>((p.end - p.start).count());
            }
            s.avg_pause_ms = total / static_cast<double>(pauses.size()) / 1000.0;
        }
        s.overlap = overlap_count(pauses);
        s.in_flight_at_deadline = in_flight;
        return s;
    }

    std::string render_table(std::span<const ConfigSummary> rows)
    {
        std::string out = "# latency in ms; quantiles use the nearest-rank definition\n";
        out += "config,count,mean,median,stddev,max";
        for (double q : kQuantileLevels)
        {
            char buf[32];
            std::snprintf(buf, sizeof buf, ",p%g", q);
            out += buf;
        }
        out += ",collections,avg_gc_pause,overlapping,in_flight\n";
        for (const auto &r : rows)
        {
            out += r.name;
            out += ',' + std::to_string(r.latency.count);
            out += ',' + ms(r.latency.mean_us);
            out += ',' + ms(r.latency.median);
            out += ',' + ms(r.latency.stddev_us);
            out += ',' + ms(r.latency.max);
            for (auto q : r.latency.quantiles)
            {
                out += ',' + ms(q);
            }
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.3f", r.avg_pause_ms);
            out += ',' + std::to_string(r.collections) + ',' + buf;
            out += ',' + std::to_string(r.overlap.overlapping_collections);
            out += ',' + std::to_string(r.in_flight_at_deadline) + '\n';
        }
        return out;
    }

    std::string render_cdf(std::span<const LatencySample> samples)
    {
        auto lat = latencies_of(samples);
        std::sort(lat.begin(), lat.end());
        std::string out;
        out.reserve(lat.size() * 24);
        const double n = static_cast<double>(lat.size());
        char buf[64];
        for (std::size_t i = 0; i < lat.size(); ++i)
        {
            std::snprintf(buf, sizeof buf, "%.3f %.9f\n", lat[i].as_millis(), static_cast<double>(i + 1) / n);
            out += buf;
        }
        return out;
    }

    std::vector<std::filesystem::path> emit_report(const std::filesystem::path &dir, std::span<const NamedRun> runs)
    {
        std::error_code ec;
        std::filesystem::create_directories(dir, ec);
        if (ec)
        {
            throw std::runtime_error("cannot create " + dir.string() + ": " + ec.message());
        }
        std::vector<ConfigSummary> rows;
        std::vector<std::filesystem::path> written;
        for (const auto &run : runs)
        {
            rows.push_back(run.summary);
            auto path = dir / ("cdf_" + run.summary.name + ".txt");
            write_file(path, run.samples ? render_cdf(*run.samples) : std::string{});
            written.push_back(path);
        }
        auto table = dir / "summary.csv";
        write_file(table, render_table(rows));
        written.insert(written.begin(), table);
        return written;
    }
}
