#pragma once

#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "geosocial/common/result.hpp"
#include "geosocial/geoloc/estimators.hpp"

namespace geosocial::sim {

struct NoiseModel {
    double toa_sigma_s = 0.0;
    double rss_sigma_db = 0.0;
    double aoa_sigma_rad = 0.0;
    double poa_sigma_rad = 0.0;
};

// What simgen reads. Reference points are either listed or drawn uniformly
// over the square [0, area_m]^2.
struct ScenarioSpec {
    std::uint64_t seed = 1;
    double area_m = 1000.0;
    std::vector<geoloc::ReferencePoint> rps;
    int num_rps = 4;
    int trials = 100;
    NoiseModel noise;
    std::vector<geoloc::MetricKind> metric_mix{geoloc::MetricKind::toa};
    geoloc::PathLossModel path_loss{};
    double wavelength_m = 0.125;
    int poa_k_max = 3;
};

struct Trial {
    int index = 0;
    geoloc::Vector2<double> truth = geoloc::Vector2<double>::Zero();
    std::vector<geoloc::Measurement> measurements;
    // Per-trial reference-point override; empty means the scenario's set.
    std::vector<geoloc::ReferencePoint> rps;
};

struct Scenario {
    std::uint64_t seed = 1;
    double area_m = 1000.0;
    std::vector<geoloc::ReferencePoint> rps;
    NoiseModel noise;
    std::vector<geoloc::MetricKind> metric_mix;
    geoloc::PathLossModel path_loss{};
    double wavelength_m = 0.125;
    int poa_k_max = 3;
    std::vector<Trial> trials;

    geoloc::FusionOptions<double> fusion_options() const;
};

Result<ScenarioSpec> parse_spec(const std::string& json_text);
Status validate(const ScenarioSpec& spec);

// Deterministic in (spec, seed): reference points, true positions and
// Gaussian measurement noise all come from one seeded mt19937_64 stream.
Result<Scenario> generate(const ScenarioSpec& spec);

// Line-delimited JSON: one header line, then one line per trial.
void write_scenario(std::ostream& out, const Scenario& scenario);
Result<Scenario> read_scenario(std::istream& in);

// Noise-free measurement of `kind` from rp about a terminal at truth.
double ideal_measurement(geoloc::MetricKind kind, const geoloc::Vector2<double>& rp,
                         const geoloc::Vector2<double>& truth, const Scenario& scenario);

}  // namespace geosocial::sim
