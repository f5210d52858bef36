#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "exit_codes.hpp"
#include "geosocial/sim/runner.hpp"

using namespace geosocial;

int main(int argc, char** argv) {
    CLI::App app{"Run the position estimator over a scenario and write an accuracy report"};
    std::string scenario_path, report_path;
    unsigned threads = 0;
    app.add_option("--scenario", scenario_path, "scenario file (NDJSON)")->required();
    app.add_option("--report", report_path, "report file to write (NDJSON)")->required();
    app.add_option("--threads", threads, "worker threads, 0 for all cores");
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? tools::kExitOk : tools::kExitValidation;
    }

    std::ifstream in(scenario_path);
    if (!in) {
        std::cerr << "cannot read " << scenario_path << '\n';
        return tools::kExitRuntime;
    }
    auto scenario = sim::read_scenario(in);
    if (!scenario) {
        std::cerr << "invalid scenario: " << scenario.error().message << '\n';
        return tools::kExitValidation;
    }
    const auto report = sim::run(*scenario, {threads});
    std::ofstream out(report_path, std::ios::binary);
    sim::write_report(out, report);
    out.close();
    if (!out) {
        std::cerr << "cannot write " << report_path << '\n';
        return tools::kExitRuntime;
    }
    const auto& s = report.summary;
    std::cout << "trials " << s.trials << "  ok " << s.succeeded << "  failed " << s.failed
              << "  median " << s.median_m << " m  p95 " << s.p95_m << " m  rmse " << s.rmse_m
              << " m  converged " << s.convergence_rate << '\n';
    return tools::kExitOk;
}
