#include "blade/scenario/runner.hpp"

#include <fstream>
#include <future>
#include <stdexcept>

namespace blade::scenario
{
    namespace
    {
        template <typename Cluster>
        RunResult finish(Cluster &cluster, const ScenarioConfig &config, GcMode mode)
        {
            RunResult r;
            r.mode = mode;
            r.events = cluster.run_until(config.effective_deadline()).events_fired;
            r.samples = cluster.samples();
            r.pauses = cluster.pause_intervals();
            r.summary = metrics::summarize(std::string(runtime::to_string(mode)), r.samples, r.pauses,
                                           static_cast<std::size_t>(cluster.in_flight()));
            return r;
        }
    }

    RunResult run_scenario(const ScenarioConfig &base, GcMode mode)
    {
        ScenarioConfig config = base;
        config.mode = mode;
        validate(config);
        const auto arrivals = metrics::generate_workload(config.workload);
        if (config.system == SystemKind::Http)
        {
            http::HttpCluster cluster(to_http(config));
            cluster.schedule_workload(arrivals);
            return finish(cluster, config, mode);
        }
        raft::RaftCluster cluster(to_raft(config));
        cluster.schedule_workload(arrivals);
        return finish(cluster, config, mode);
    }

    std::vector<RunResult> run_compare(const ScenarioConfig &config, bool parallel)
    {
        const GcMode modes[] = {GcMode::On, GcMode::Off, GcMode::Blade};
        std::vector<RunResult> out;
        if (!parallel)
        {
            for (GcMode m : modes)
            {
                out.push_back(run_scenario(config, m));
            }
            return out;
        }
        std::vector<std::future<RunResult>> jobs;
        for (GcMode m : modes)
        {
            jobs.push_back(std::async(std::launch::async, [&config, m] { return run_scenario(config, m); }));
        }
        for (auto &j : jobs)
        {
            out.push_back(j.get());
        }
        return out;
    }

    std::vector<std::filesystem::path> write_reports(const std::filesystem::path &dir, const ScenarioConfig &config,
                                                     const std::vector<RunResult> &runs)
    {
        std::vector<metrics::NamedRun> named;
        for (const auto &r : runs)
        {
            named.push_back({r.summary, &r.samples});
        }
        auto written = metrics::emit_report(dir, named);
        const auto path = dir / "config.yaml";
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        out << serialize_config(config);
        if (!out.flush())
        {
            throw std::runtime_error("cannot write " + path.string());
        }
        written.push_back(path);
        return written;
    }
}
