#include "geosocial/sim/runner.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

namespace geosocial::sim {

using nlohmann::json;

TrialOutcome run_trial(const Scenario& sc, const Trial& trial) {
    TrialOutcome out;
    out.trial = trial.index;
    const auto& rps = trial.rps.empty() ? sc.rps : trial.rps;
    auto est = geoloc::fuse_estimate(std::span<const geoloc::ReferencePoint>(rps),
                                     std::span<const geoloc::Measurement>(trial.measurements),
                                     sc.fusion_options());
    if (!est) {
        out.error = est.code();
        return out;
    }
    out.ok = true;
    out.estimate = *est;
    out.error_m = (est->position - trial.truth).norm();
    return out;
}

AccuracyReport run(const Scenario& sc, const RunOptions& options) {
    const std::size_t n = sc.trials.size();
    std::vector<TrialOutcome> rows(n);
    unsigned threads = options.threads ? options.threads : std::thread::hardware_concurrency();
    threads = std::clamp<unsigned>(threads, 1, static_cast<unsigned>(std::max<std::size_t>(n, 1)));

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i; (i = next.fetch_add(1)) < n;) rows[i] = run_trial(sc, sc.trials[i]);
    };
    std::vector<std::jthread> pool;
    for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
    pool.clear();

    std::stable_sort(rows.begin(), rows.end(),
                     [](const TrialOutcome& a, const TrialOutcome& b) { return a.trial < b.trial; });
    AccuracyReport report;
    report.summary = summarize(rows);
    report.rows = std::move(rows);
    return report;
}

double median(std::vector<double> v) {
    if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
    std::sort(v.begin(), v.end());
    const auto n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double percentile_nearest_rank(std::vector<double> v, double p) {
    if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
    std::sort(v.begin(), v.end());
    auto rank = static_cast<std::size_t>(std::ceil(p / 100.0 * static_cast<double>(v.size())));
    rank = std::clamp<std::size_t>(rank, 1, v.size());
    return v[rank - 1];
}

ReportSummary summarize(const std::vector<TrialOutcome>& rows) {
    ReportSummary s;
    s.trials = static_cast<int>(rows.size());
    std::vector<double> errors;
    int converged = 0;
    double sq = 0.0;
    for (const auto& r : rows) {
        if (!r.ok) continue;
        errors.push_back(r.error_m);
        sq += r.error_m * r.error_m;
        if (r.estimate.converged) ++converged;
    }
    s.succeeded = static_cast<int>(errors.size());
    s.failed = s.trials - s.succeeded;
    s.median_m = median(errors);
    s.p95_m = percentile_nearest_rank(errors, 95.0);
    s.rmse_m = errors.empty() ? std::numeric_limits<double>::quiet_NaN()
                              : std::sqrt(sq / static_cast<double>(errors.size()));
    s.convergence_rate = s.trials ? static_cast<double>(converged) / s.trials : 0.0;
    return s;
}

namespace {

// JSON has no NaN; an empty statistic is written as null.
json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

double number_or_nan(const json& j) {
    return j.is_number() ? j.get<double>() : std::numeric_limits<double>::quiet_NaN();
}

}  // namespace

void write_report(std::ostream& out, const AccuracyReport& report) {
    for (const auto& r : report.rows) {
        json line{{"type", "trial"}, {"trial", r.trial}, {"ok", r.ok}};
        if (r.ok) {
            line["x"] = r.estimate.position.x();
            line["y"] = r.estimate.position.y();
            line["error_m"] = r.error_m;
            line["converged"] = r.estimate.converged;
            line["iterations"] = r.estimate.iterations;
            line["rms_residual_m"] = r.estimate.rms_residual_m;
            if (r.estimate.poa_dropped) line["poa_dropped"] = true;
        } else {
            line["error"] = to_string(r.error);
        }
        out << line.dump() << '\n';
    }
    const auto& s = report.summary;
    json summary{{"type", "summary"},
                 {"trials", s.trials},
                 {"succeeded", s.succeeded},
                 {"failed", s.failed},
                 {"median_m", number_or_null(s.median_m)},
                 {"p95_m", number_or_null(s.p95_m)},
                 {"rmse_m", number_or_null(s.rmse_m)},
                 {"convergence_rate", s.convergence_rate}};
    out << summary.dump() << '\n';
}

Result<ParsedReport> read_report(std::istream& in) {
    ParsedReport parsed;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto j = json::parse(line, nullptr, false);
        if (!j.is_object() || !j.contains("type"))
            return Error{ErrorCode::malformed, "malformed report line"};
        try {
            if (j["type"] == "trial") {
                TrialOutcome r;
                r.trial = j.at("trial").get<int>();
                r.ok = j.at("ok").get<bool>();
                if (r.ok) {
                    r.estimate.position = {j.at("x").get<double>(), j.at("y").get<double>()};
                    r.error_m = j.at("error_m").get<double>();
                    r.estimate.converged = j.at("converged").get<bool>();
                    r.estimate.iterations = j.at("iterations").get<int>();
                    r.estimate.rms_residual_m = j.at("rms_residual_m").get<double>();
                    r.estimate.poa_dropped = j.value("poa_dropped", false);
                }
                parsed.rows.push_back(std::move(r));
            } else if (j["type"] == "summary") {
                ReportSummary s;
                s.trials = j.at("trials").get<int>();
                s.succeeded = j.at("succeeded").get<int>();
                s.failed = j.at("failed").get<int>();
                s.median_m = number_or_nan(j.at("median_m"));
                s.p95_m = number_or_nan(j.at("p95_m"));
                s.rmse_m = number_or_nan(j.at("rmse_m"));
                s.convergence_rate = j.at("convergence_rate").get<double>();
                parsed.summary = s;
            } else {
                return Error{ErrorCode::malformed, "unknown report line type"};
            }
        } catch (const json::exception& e) {
            return Error{ErrorCode::malformed, e.what()};
        }
    }
    return parsed;
}

}  // namespace geosocial::sim
