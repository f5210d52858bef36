#include <doctest.h>

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <thread>

#include "geosocial/sim/runner.hpp"
#include "support.hpp"

#include <httplib.h>

using namespace geosocial;
using namespace geosocial::sim;
using geoloc::MetricKind;

namespace {

std::string scenario_bytes(const Scenario& sc) {
    std::ostringstream out;
    write_scenario(out, sc);
    return out.str();
}

std::string report_bytes(const AccuracyReport& r) {
    std::ostringstream out;
    write_report(out, r);
    return out.str();
}

ScenarioSpec toa_spec(int trials, double sigma_s = 0) {
    ScenarioSpec s;
    s.seed = 42;
    s.num_rps = 4;
    s.trials = trials;
    s.noise.toa_sigma_s = sigma_s;
    return s;
}

}  // namespace

TEST_CASE("generation is deterministic in the seed") {
    auto spec = toa_spec(50);
    CHECK(scenario_bytes(*generate(spec)) == scenario_bytes(*generate(spec)));
    spec.seed = 43;
    CHECK(scenario_bytes(*generate(spec)) != scenario_bytes(*generate(toa_spec(50))));
}

TEST_CASE("spec validation") {
    auto two = toa_spec(10);
    two.num_rps = 2;
    CHECK(generate(two).code() == ErrorCode::invalid_argument);
    two.metric_mix = {MetricKind::aoa};
    CHECK(generate(two));
    CHECK(parse_spec(R"({"trials":0})").code() == ErrorCode::invalid_argument);
    CHECK(parse_spec(R"({"metric_mix":["GPS"]})").code() == ErrorCode::invalid_argument);
    CHECK(parse_spec(R"({"noise":{"toa_sigma_s":-1}})").code() == ErrorCode::invalid_argument);
    CHECK(parse_spec("not json").code() == ErrorCode::invalid_argument);
    auto listed = parse_spec(R"({"rps":[{"rp_id":"a","x":0,"y":0},{"rp_id":"b","x":10,"y":0},
                                        {"rp_id":"c","x":0,"y":10}],"trials":3})");
    REQUIRE(listed);
    CHECK(listed->rps.size() == 3);
}

TEST_CASE("zero noise gives the analytic measurement values") {
    auto spec = toa_spec(20);
    spec.metric_mix = {MetricKind::toa, MetricKind::rss, MetricKind::aoa, MetricKind::poa};
    auto sc = generate(spec);
    REQUIRE(sc);
    for (const auto& t : sc->trials) {
        std::size_t k = 0;
        for (const auto& rp : sc->rps) {
            const auto d = t.truth - rp.position;
            const double dist = d.norm();
            const double cycles = dist / sc->wavelength_m;
            const double expected[] = {dist / 299792458.0,
                                       -40.0 - 20.0 * std::log10(dist),
                                       std::atan2(d.y(), d.x()),
                                       2 * std::numbers::pi * (cycles - std::floor(cycles))};
            for (double e : expected) {
                const auto& m = t.measurements[k++];
                CHECK(m.rp_id == rp.rp_id);
                CHECK(m.value == doctest::Approx(e).epsilon(1e-12));
                CHECK_FALSE(m.noise_sigma);
            }
        }
    }
}

TEST_CASE("scenario files round-trip") {
    auto spec = toa_spec(10, 1e-8);
    spec.metric_mix = {MetricKind::toa, MetricKind::aoa};
    spec.noise.aoa_sigma_rad = 0.01;
    auto sc = generate(spec);
    REQUIRE(sc);
    const auto bytes = scenario_bytes(*sc);
    std::istringstream in(bytes);
    auto back = read_scenario(in);
    REQUIRE(back);
    CHECK(scenario_bytes(*back) == bytes);

    std::istringstream garbage("{\"type\":\"trial\"}\n");
    CHECK_FALSE(read_scenario(garbage));
    std::istringstream empty("");
    CHECK_FALSE(read_scenario(empty));
}

TEST_CASE("noiseless run recovers every trial") {
    auto sc = generate(toa_spec(100));
    auto rep = run(*sc);
    CHECK(rep.summary.trials == 100);
    CHECK(rep.summary.failed == 0);
    CHECK(rep.summary.median_m < 1e-6);
    CHECK(rep.summary.convergence_rate == 1.0);
}

TEST_CASE("range noise of 3 m raises the median error") {
    const double sigma_s = 3.0 / 299792458.0;
    auto clean = run(*generate(toa_spec(200)));
    auto noisy = run(*generate(toa_spec(200, sigma_s)));
    CHECK(std::isfinite(noisy.summary.median_m));
    CHECK(noisy.summary.median_m >= clean.summary.median_m);
    CHECK(noisy.summary.median_m < 20.0);
}

TEST_CASE("a degenerate trial fails alone") {
    auto sc = generate(toa_spec(5));
    REQUIRE(sc);
    auto& bad = sc->trials[2];
    bad.rps = {{"rp0", {0, 0}}, {"rp1", {100, 0}}, {"rp2", {200, 0}}, {"rp3", {300, 0}}};
    bad.measurements.clear();
    for (const auto& rp : bad.rps)
        bad.measurements.push_back(
            {rp.rp_id, MetricKind::toa, geoloc::distance_to_toa((bad.truth - rp.position).norm()), {}});
    auto rep = run(*sc);
    REQUIRE(rep.rows.size() == 5);
    for (const auto& r : rep.rows) {
        CHECK(r.ok == (r.trial != 2));
    }
    CHECK(rep.rows[2].error == ErrorCode::collinear_rps);
    CHECK(rep.summary.failed == 1);
    CHECK(report_bytes(rep).find("\"error\":\"collinear_rps\"") != std::string::npos);
}

TEST_CASE("summary statistics are recomputable from the rows") {
    auto spec = toa_spec(101, 5.0 / 299792458.0);
    auto rep = run(*generate(spec));
    std::istringstream in(report_bytes(rep));
    auto parsed = read_report(in);
    REQUIRE(parsed);
    REQUIRE(parsed->summary);
    REQUIRE(parsed->rows.size() == 101);

    std::vector<double> errs;
    double sq = 0;
    int conv = 0;
    for (const auto& r : parsed->rows) {
        errs.push_back(r.error_m);
        sq += r.error_m * r.error_m;
        conv += r.estimate.converged;
    }
    std::sort(errs.begin(), errs.end());
    CHECK(parsed->summary->median_m == errs[50]);
    CHECK(parsed->summary->p95_m == errs[static_cast<std::size_t>(std::ceil(0.95 * 101)) - 1]);
    CHECK(parsed->summary->rmse_m == doctest::Approx(std::sqrt(sq / 101)).epsilon(1e-12));
    CHECK(parsed->summary->convergence_rate == doctest::Approx(conv / 101.0));
    const auto recomputed = summarize(parsed->rows);
    CHECK(recomputed.median_m == parsed->summary->median_m);
    CHECK(recomputed.rmse_m == parsed->summary->rmse_m);
}

TEST_CASE("percentiles") {
    CHECK(median({3, 1, 2}) == 2);
    CHECK(median({4, 1, 2, 3}) == 2.5);
    CHECK(std::isnan(median({})));
    std::vector<double> v(20);
    for (int i = 0; i < 20; ++i) v[i] = i + 1;
    CHECK(percentile_nearest_rank(v, 95) == 19);
    CHECK(percentile_nearest_rank(v, 100) == 20);
    CHECK(percentile_nearest_rank(v, 0) == 1);
}

TEST_CASE("report is identical regardless of thread count") {
    auto spec = toa_spec(300, 2.0 / 299792458.0);
    spec.metric_mix = {MetricKind::toa, MetricKind::rss, MetricKind::aoa};
    spec.noise.rss_sigma_db = 2;
    spec.noise.aoa_sigma_rad = 0.02;
    auto sc = generate(spec);
    CHECK(report_bytes(run(*sc, {1})) == report_bytes(run(*sc, {4})));
}

TEST_CASE("command line tools") {
    testing::TempDir dir;
    const auto spec = dir.file("spec.json");
    std::ofstream(spec) << R"({"seed":7,"area_m":1000,"num_rps":4,"trials":50,
                               "metric_mix":["TOA","AOA"],
                               "noise":{"toa_sigma_s":1e-8,"aoa_sigma_rad":0.01}})";
    const auto simgen = testing::tool_path("simgen");
    const auto simrun = testing::tool_path("simrun");
    const auto quiet = " > /dev/null 2>&1";

    CHECK(testing::run_command(simgen + " --spec " + spec + " --out " + dir.file("a.ndjson") + quiet) == 0);
    CHECK(testing::run_command(simgen + " --spec " + spec + " --out " + dir.file("b.ndjson") + quiet) == 0);
    CHECK(testing::read_file(dir.file("a.ndjson")) == testing::read_file(dir.file("b.ndjson")));

    CHECK(testing::run_command(simrun + " --scenario " + dir.file("a.ndjson") + " --report " +
                               dir.file("r1.ndjson") + quiet) == 0);
    CHECK(testing::run_command(simrun + " --scenario " + dir.file("a.ndjson") + " --report " +
                               dir.file("r2.ndjson") + " --threads 3" + quiet) == 0);
    const auto r1 = testing::read_file(dir.file("r1.ndjson"));
    CHECK_FALSE(r1.empty());
    CHECK(r1 == testing::read_file(dir.file("r2.ndjson")));

    std::ofstream(dir.file("bad.json")) << R"({"num_rps":2,"metric_mix":["TOA"]})";
    CHECK(testing::run_command(simgen + " --spec " + dir.file("bad.json") + " --out " + dir.file("x") + quiet) == 1);
    CHECK(testing::run_command(simgen + quiet) == 1);
    CHECK(testing::run_command(simrun + " --scenario " + dir.file("nope") + " --report " + dir.file("y") + quiet) == 2);
    std::ofstream(dir.file("junk.ndjson")) << "{}\n";
    CHECK(testing::run_command(simrun + " --scenario " + dir.file("junk.ndjson") + " --report " + dir.file("y") + quiet) == 1);
    CHECK(testing::run_command(testing::tool_path("seed-demo") + " --url http://127.0.0.1:1" + quiet) == 2);
}

TEST_CASE("server binary starts, serves and stops on SIGTERM") {
    testing::TempDir dir;
    const auto log = dir.file("server.log");
    const auto cmd = "cd " + dir.path().string() + " && GEOSOCIAL_PLACES=" + testing::places_csv() + " " +
                     testing::tool_path("geosocial-server") + " --bind 127.0.0.1:0 --db " + dir.file("s.db") +
                     " > " + log + " 2>&1 & echo $! > " + dir.file("pid");
    REQUIRE(testing::run_command(cmd) == 0);
    std::string out;
    for (int i = 0; i < 100 && out.find("listening on") == std::string::npos; ++i) {
        std::this_thread::sleep_for(std::chrono::milliseconds(50));
        out = testing::read_file(log);
    }
    CHECK(out.find("listening on http://127.0.0.1:") != std::string::npos);
    const auto start = out.find("http://");
    REQUIRE(start != std::string::npos);
    const auto url = out.substr(start, out.find('\n', start) - start);
    httplib::Client client(url);
    auto health = client.Get("/health");
    REQUIRE(health);
    CHECK(health->status == 200);

    const auto pid = testing::read_file(dir.file("pid"));
    CHECK(testing::run_command("kill -TERM " + pid) == 0);
    bool closed = false;
    for (int i = 0; i < 100 && !closed; ++i) {
        std::this_thread::sleep_for(std::chrono::milliseconds(50));
        closed = !client.Get("/health");
    }
    CHECK(closed);
    CHECK(testing::read_file(log).find("shutting down") != std::string::npos);
}
