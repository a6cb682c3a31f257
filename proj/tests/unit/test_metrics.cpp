#include "blade/metrics/overlap.hpp"
#include "blade/metrics/percentiles.hpp"
#include "blade/metrics/report.hpp"
#include "blade/metrics/workload.hpp"

#include "../support/oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <fstream>
#include <random>

using namespace blade;
using namespace blade::metrics;
using sim::SimTime;

TEST_CASE("uniform workload spacing and mix")
{
    WorkloadConfig c;
    c.rate_per_second = 100;
    c.duration = SimTime::seconds(10);
    const auto w = generate_workload(c);
    REQUIRE(w.size() == 1000);
    for (std::size_t i = 0; i < w.size(); ++i)
    {
        CHECK(w[i].request_id == i + 1);
        CHECK(w[i].at == SimTime::millis(static_cast<std::int64_t>(10 * i)));
        CHECK(w[i].kind == (i % 4 == 3 ? RequestKind::Set : RequestKind::Get));
    }
}

TEST_CASE("600 s at 100 req/s gives 60000 requests with a 3:1 mix")
{
    WorkloadConfig c;
    const auto w = generate_workload(c);
    CHECK(w.size() == 60000);
    const auto sets = std::count_if(w.begin(), w.end(), [](const Arrival &a) { return a.kind == RequestKind::Set; });
    CHECK(sets == 15000);
}

TEST_CASE("poisson workload is reproducible and has the requested rate")
{
    WorkloadConfig c;
    c.arrivals = ArrivalProcess::Poisson;
    c.order = MixOrder::Random;
    c.rate_per_second = 1000;
    c.duration = SimTime::seconds(100);
    c.seed = 9;
    const auto a = generate_workload(c);
    const auto b = generate_workload(c);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i)
    {
        CHECK(a[i].at == b[i].at);
        CHECK(a[i].kind == b[i].kind);
    }
    CHECK(std::abs(static_cast<double>(a.size()) - 100000.0) < 1500.0);
    CHECK(std::is_sorted(a.begin(), a.end(), [](const Arrival &x, const Arrival &y) { return x.at < y.at; }));
    const auto sets = std::count_if(a.begin(), a.end(), [](const Arrival &x) { return x.kind == RequestKind::Set; });
    CHECK(std::abs(static_cast<double>(sets) / static_cast<double>(a.size()) - 0.25) < 0.01);
    c.seed = 10;
    CHECK(generate_workload(c).front().request_id == 1);
}

TEST_CASE("http workload ignores the mix")
{
    WorkloadConfig c;
    c.http = true;
    c.gets = 0;
    c.sets = 0;
    c.rate_per_second = 6000;
    c.duration = SimTime::seconds(1);
    const auto w = generate_workload(c);
    CHECK(w.size() == 6000);
    CHECK(std::all_of(w.begin(), w.end(), [](const Arrival &a) { return a.kind == RequestKind::Http; }));
}

TEST_CASE("bad workloads are rejected")
{
    WorkloadConfig c;
    c.rate_per_second = 0;
    CHECK_THROWS_AS(generate_workload(c), std::invalid_argument);
    c.rate_per_second = -5;
    CHECK_THROWS_AS(generate_workload(c), std::invalid_argument);
    c.rate_per_second = 10;
    c.gets = 0;
    c.sets = 0;
    CHECK_THROWS_AS(generate_workload(c), std::invalid_argument);
}

TEST_CASE("nearest rank on small lists")
{
    std::vector<SimTime> v;
    for (int i = 1; i <= 10; ++i)
    {
        v.push_back(SimTime::micros(i));
    }
    CHECK(nearest_rank(v, 50) == SimTime::micros(5));
    CHECK(nearest_rank(v, 90) == SimTime::micros(9));
    CHECK(nearest_rank(v, 91) == SimTime::micros(10));
    CHECK(nearest_rank(v, 100) == SimTime::micros(10));
    CHECK(nearest_rank(v, 0) == SimTime::micros(1));
    CHECK_THROWS_AS(percentiles(std::span<const SimTime>{}), std::invalid_argument);
}

TEST_CASE("percentiles agree with a scanning oracle")
{
    std::mt19937_64 rng(3);
    for (std::size_t n : {1u, 2u, 7u, 100u, 999u, 10000u, 100000u})
    {
        std::lognormal_distribution<double> dist(6.0, 1.0);
        std::vector<SimTime> v;
        for (std::size_t i = 0; i < n; ++i)
        {
            v.push_back(SimTime::micros(std::llround(dist(rng))));
        }
        const auto r = percentiles(v);
        CHECK(r.count == n);
        CHECK(r.median == oracle::quantile(v, 50.0));
        CHECK(r.max == *std::max_element(v.begin(), v.end()));
        for (std::size_t k = 0; k < kQuantileLevels.size(); ++k)
        {
            CHECK(r.quantiles[k] == oracle::quantile(v, kQuantileLevels[k]));
        }
        long double sum = 0;
        for (auto t : v)
        {
            sum += t.count();
        }
        const long double mean = sum / n;
        long double sq = 0;
        for (auto t : v)
        {
            sq += (t.count() - mean) * (t.count() - mean);
        }
        CHECK(r.mean_us == doctest::Approx(static_cast<double>(mean)).epsilon(1e-9));
        CHECK(r.stddev_us == doctest::Approx(static_cast<double>(std::sqrt(sq / n))).epsilon(1e-6));
    }
}

TEST_CASE("constant latencies have zero spread")
{
    std::vector<SimTime> v(500, SimTime::micros(448));
    const auto r = percentiles(v);
    CHECK(r.stddev_us == 0.0);
    CHECK(r.mean_us == 448.0);
    for (auto q : r.quantiles)
    {
        CHECK(q == SimTime::micros(448));
    }
}

TEST_CASE("overlap count matches brute force")
{
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 300; ++trial)
    {
        std::uniform_int_distribution<std::uint32_t> node(0, 3);
        std::uniform_int_distribution<std::int64_t> start(0, 500), len(0, 40);
        std::uniform_int_distribution<int> count(0, 30);
        std::vector<PauseInterval> v;
        const int n = count(rng);
        for (int i = 0; i < n; ++i)
        {
            const auto s = start(rng);
            v.push_back({sim::NodeId{node(rng)}, SimTime::micros(s), SimTime::micros(s + len(rng))});
        }
        const auto got = overlap_count(v);
        CHECK(got.total_collections == v.size());
        CHECK(got.overlapping_collections == oracle::overlapping(v));
    }
}

TEST_CASE("touching intervals and same-node intervals do not overlap")
{
    std::vector<PauseInterval> v{
        {sim::NodeId{0}, SimTime::millis(0), SimTime::millis(10)},
        {sim::NodeId{1}, SimTime::millis(10), SimTime::millis(20)},
        {sim::NodeId{1}, SimTime::millis(15), SimTime::millis(18)},
    };
    CHECK(overlap_count(v).overlapping_collections == 0);
    v.push_back({sim::NodeId{2}, SimTime::millis(9), SimTime::millis(11)});
    CHECK(overlap_count(v).overlapping_collections == 3);
    CHECK(overlap_count(v).fraction() == doctest::Approx(0.75));
    v.push_back({sim::NodeId{3}, SimTime::millis(5), SimTime::millis(4)});
    CHECK_THROWS(overlap_count(v));
}

namespace
{
    std::vector<LatencySample> samples_of(std::initializer_list<std::int64_t> micros)
    {
        std::vector<LatencySample> out;
        std::uint64_t id = 1;
        for (auto us : micros)
        {
            out.push_back({id, SimTime::millis(static_cast<std::int64_t>(id)), SimTime::millis(static_cast<std::int64_t>(id)) + SimTime::micros(us), sim::NodeId{0}, RequestKind::Get});
            ++id;
        }
        return out;
    }
}

TEST_CASE("summary table has one row per configuration")
{
    const auto s = samples_of({1000, 2000, 3000, 4000});
    std::vector<PauseInterval> pauses{{sim::NodeId{0}, SimTime::millis(0), SimTime::millis(12)},
                                      {sim::NodeId{1}, SimTime::millis(5), SimTime::millis(19)}};
    const auto row = summarize("gc-on", s, pauses, 2);
    CHECK(row.collections == 2);
    CHECK(row.avg_pause_ms == doctest::Approx(13.0));
    CHECK(row.overlap.overlapping_collections == 2);
    const auto table = render_table(std::vector{row});
    CHECK(table.find("config,count,mean,median,stddev,max,p95,p99,p99.9,p99.99,p99.999,p99.9999,collections") !=
          std::string::npos);
    CHECK(table.find("gc-on,4,2.500,2.000,1.118,4.000,4.000,4.000,4.000,4.000,4.000,4.000,2,13.000,2,2\n") !=
          std::string::npos);
}

TEST_CASE("cdf lines are ascending with cumulative fractions")
{
    const auto s = samples_of({3000, 1000, 2000, 4000});
    CHECK(render_cdf(s) == "1.000 0.250000000\n2.000 0.500000000\n3.000 0.750000000\n4.000 1.000000000\n");
}

TEST_CASE("reports land in the output directory")
{
    const auto dir = std::filesystem::temp_directory_path() / "blade_report_test";
    std::filesystem::remove_all(dir);
    const auto s = samples_of({1000});
    std::vector<NamedRun> runs{{summarize("blade", s, {}, 0), &s}};
    const auto paths = emit_report(dir / "nested", runs);
    REQUIRE(paths.size() == 2);
    CHECK(paths[0].filename() == "summary.csv");
    CHECK(paths[1].filename() == "cdf_blade.txt");
    CHECK(std::filesystem::exists(paths[0]));
    std::filesystem::remove_all(dir);
}

TEST_CASE("an unwritable output directory is reported")
{
    const auto file = std::filesystem::temp_directory_path() / "blade_report_blocker";
    std::ofstream(file) << "x";
    const auto s = samples_of({1000});
    std::vector<NamedRun> runs{{summarize("blade", s, {}, 0), &s}};
    CHECK_THROWS_AS(emit_report(file / "sub", runs), std::runtime_error);
    std::filesystem::remove(file);
}
