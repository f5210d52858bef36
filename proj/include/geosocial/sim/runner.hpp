#pragma once

#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "geosocial/common/result.hpp"
#include "geosocial/sim/scenario.hpp"

namespace geosocial::sim {

struct TrialOutcome {
    int trial = 0;
    bool ok = false;
    // Populated when ok.
    geoloc::PositionEstimate estimate;
    double error_m = 0.0;
    // Populated when !ok.
    ErrorCode error = ErrorCode::internal;
};

struct ReportSummary {
    int trials = 0;
    int succeeded = 0;
    int failed = 0;
    // Error statistics over the successful trials; NaN when there are none.
    double median_m = 0.0;
    double p95_m = 0.0;
    double rmse_m = 0.0;
    // Converged trials over all trials.
    double convergence_rate = 0.0;
};

struct AccuracyReport {
    std::vector<TrialOutcome> rows;  // sorted by trial index
    ReportSummary summary;
};

struct RunOptions {
    unsigned threads = 0;  // 0: hardware concurrency
};

TrialOutcome run_trial(const Scenario& scenario, const Trial& trial);
AccuracyReport run(const Scenario& scenario, const RunOptions& options = {});

// Recomputed from the rows alone; run() uses this too.
ReportSummary summarize(const std::vector<TrialOutcome>& rows);

// Median (mean of middle pair) and nearest-rank percentile of a sample.
double median(std::vector<double> v);
double percentile_nearest_rank(std::vector<double> v, double p);

void write_report(std::ostream& out, const AccuracyReport& report);

// Reads rows and summary back; used to recompute statistics from a file.
struct ParsedReport {
    std::vector<TrialOutcome> rows;
    std::optional<ReportSummary> summary;
};
Result<ParsedReport> read_report(std::istream& in);

}  // namespace geosocial::sim
