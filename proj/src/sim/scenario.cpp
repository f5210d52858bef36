#include "geosocial/sim/scenario.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "geosocial/api/json_io.hpp"

namespace geosocial::sim {

using nlohmann::json;
using geoloc::MetricKind;
using Vec2 = geoloc::Vector2<double>;

namespace {

Error invalid(std::string msg) { return {ErrorCode::invalid_argument, std::move(msg)}; }

template <typename T>
Status read_opt(const json& j, const char* key, T& out) {
    if (!j.contains(key)) return {};
    try {
        out = j.at(key).get<T>();
    } catch (const json::exception&) {
        return invalid(std::string("'") + key + "' has the wrong type");
    }
    return {};
}

Result<NoiseModel> parse_noise(const json& j) {
    NoiseModel n;
    if (!j.is_object()) return invalid("'noise' must be an object");
    for (auto [key, slot] : {std::pair{"toa_sigma_s", &n.toa_sigma_s},
                             std::pair{"rss_sigma_db", &n.rss_sigma_db},
                             std::pair{"aoa_sigma_rad", &n.aoa_sigma_rad},
                             std::pair{"poa_sigma_rad", &n.poa_sigma_rad}})
        if (auto st = read_opt(j, key, *slot); !st) return st.error();
    return n;
}

json noise_json(const NoiseModel& n) {
    return {{"toa_sigma_s", n.toa_sigma_s},
            {"rss_sigma_db", n.rss_sigma_db},
            {"aoa_sigma_rad", n.aoa_sigma_rad},
            {"poa_sigma_rad", n.poa_sigma_rad}};
}

Result<std::vector<MetricKind>> parse_mix(const json& j) {
    if (!j.is_array()) return invalid("'metric_mix' must be an array");
    std::vector<MetricKind> out;
    for (const auto& e : j) {
        if (!e.is_string()) return invalid("metric_mix entries must be strings");
        auto k = geoloc::parse_metric_kind(e.get<std::string>());
        if (!k) return invalid("unknown metric: " + e.get<std::string>());
        out.push_back(*k);
    }
    return out;
}

json mix_json(const std::vector<MetricKind>& mix) {
    json arr = json::array();
    for (auto k : mix) arr.push_back(geoloc::to_string(k));
    return arr;
}

bool has(const std::vector<MetricKind>& mix, MetricKind k) {
    return std::find(mix.begin(), mix.end(), k) != mix.end();
}

Status validate_noise(const NoiseModel& n) {
    for (double s : {n.toa_sigma_s, n.rss_sigma_db, n.aoa_sigma_rad, n.poa_sigma_rad})
        if (!std::isfinite(s) || s < 0) return invalid("noise sigmas must be finite and >= 0");
    return {};
}

Status validate_geometry(const std::vector<MetricKind>& mix, std::size_t rp_count) {
    const std::size_t need = has(mix, MetricKind::aoa) ? 2 : 3;
    if (rp_count < need)
        return invalid("metric mix needs at least " + std::to_string(need) + " reference points");
    return {};
}

}  // namespace

geoloc::FusionOptions<double> Scenario::fusion_options() const {
    geoloc::FusionOptions<double> opts;
    opts.path_loss = path_loss;
    opts.wavelength_m = wavelength_m;
    opts.poa_k_max = poa_k_max;
    return opts;
}

Result<ScenarioSpec> parse_spec(const std::string& text) {
    const auto j = json::parse(text, nullptr, false);
    if (!j.is_object()) return invalid("scenario spec must be a JSON object");
    ScenarioSpec spec;
    if (auto st = read_opt(j, "seed", spec.seed); !st) return st.error();
    if (auto st = read_opt(j, "area_m", spec.area_m); !st) return st.error();
    if (auto st = read_opt(j, "num_rps", spec.num_rps); !st) return st.error();
    if (auto st = read_opt(j, "trials", spec.trials); !st) return st.error();
    if (auto st = read_opt(j, "wavelength_m", spec.wavelength_m); !st) return st.error();
    if (auto st = read_opt(j, "poa_k_max", spec.poa_k_max); !st) return st.error();
    if (j.contains("rps")) {
        auto rps = api::parse_reference_points(j["rps"]);
        if (!rps) return invalid(rps.error().message);
        spec.rps = std::move(*rps);
        spec.num_rps = static_cast<int>(spec.rps.size());
    }
    if (j.contains("noise")) {
        auto n = parse_noise(j["noise"]);
        if (!n) return n.error();
        spec.noise = *n;
    }
    if (j.contains("metric_mix")) {
        auto mix = parse_mix(j["metric_mix"]);
        if (!mix) return mix.error();
        spec.metric_mix = std::move(*mix);
    }
    if (j.contains("path_loss")) {
        auto pl = api::parse_path_loss(j["path_loss"]);
        if (!pl) return invalid(pl.error().message);
        spec.path_loss = *pl;
    }
    if (auto st = validate(spec); !st) return st.error();
    return spec;
}

Status validate(const ScenarioSpec& spec) {
    if (!(spec.area_m > 0) || !std::isfinite(spec.area_m)) return invalid("area_m must be positive");
    if (spec.trials < 1) return invalid("trials must be at least 1");
    if (spec.metric_mix.empty()) return invalid("metric_mix must not be empty");
    if (!spec.path_loss.valid()) return invalid("invalid path-loss model");
    if (!(spec.wavelength_m > 0)) return invalid("wavelength_m must be positive");
    if (spec.poa_k_max < 0) return invalid("poa_k_max must be >= 0");
    if (auto st = validate_noise(spec.noise); !st) return st;
    const auto rp_count = spec.rps.empty() ? static_cast<std::size_t>(std::max(spec.num_rps, 0))
                                           : spec.rps.size();
    return validate_geometry(spec.metric_mix, rp_count);
}

double ideal_measurement(MetricKind kind, const Vec2& rp, const Vec2& truth,
                         const Scenario& sc) {
    const double d = (truth - rp).norm();
    switch (kind) {
        case MetricKind::toa: return geoloc::distance_to_toa(d);
        case MetricKind::rss: return geoloc::distance_to_rss(d, sc.path_loss);
        case MetricKind::aoa: return std::atan2(truth.y() - rp.y(), truth.x() - rp.x());
        case MetricKind::poa: {
            const double cycles = d / sc.wavelength_m;
            return 2.0 * std::numbers::pi * (cycles - std::floor(cycles));
        }
    }
    return 0.0;
}

Result<Scenario> generate(const ScenarioSpec& spec) {
    if (auto st = validate(spec); !st) return st.error();
    std::mt19937_64 rng(spec.seed);
    std::uniform_real_distribution<double> coord(0.0, spec.area_m);
    std::normal_distribution<double> unit_normal(0.0, 1.0);

    Scenario sc;
    sc.seed = spec.seed;
    sc.area_m = spec.area_m;
    sc.noise = spec.noise;
    sc.metric_mix = spec.metric_mix;
    sc.path_loss = spec.path_loss;
    sc.wavelength_m = spec.wavelength_m;
    sc.poa_k_max = spec.poa_k_max;
    sc.rps = spec.rps;
    if (sc.rps.empty())
        for (int i = 0; i < spec.num_rps; ++i) {
            const double x = coord(rng), y = coord(rng);
            sc.rps.push_back({"rp" + std::to_string(i), {x, y}});
        }

    constexpr double two_pi = 2.0 * std::numbers::pi;
    const auto& n = spec.noise;
    for (int t = 0; t < spec.trials; ++t) {
        Trial trial;
        trial.index = t;
        const double tx = coord(rng), ty = coord(rng);
        trial.truth = {tx, ty};
        for (const auto& rp : sc.rps) {
            const double d = (trial.truth - rp.position).norm();
            for (auto kind : sc.metric_mix) {
                geoloc::Measurement m{rp.rp_id, kind, ideal_measurement(kind, rp.position, trial.truth, sc),
                                      std::nullopt};
                // One draw per measurement, always, so the stream does not
                // depend on which sigmas are zero.
                const double z = unit_normal(rng);
                switch (kind) {
                    case MetricKind::toa:
                        m.value += n.toa_sigma_s * z;
                        if (n.toa_sigma_s > 0) m.noise_sigma = geoloc::kSpeedOfLight * n.toa_sigma_s;
                        break;
                    case MetricKind::rss:
                        m.value += n.rss_sigma_db * z;
                        // Delta method: dd = d ln10 / (10 n) * d(rss).
                        if (n.rss_sigma_db > 0)
                            m.noise_sigma = std::max(d, spec.path_loss.d0_m) * std::log(10.0) /
                                            (10.0 * spec.path_loss.exponent_n) * n.rss_sigma_db;
                        break;
                    case MetricKind::aoa:
                        m.value = geoloc::wrap_angle(m.value + n.aoa_sigma_rad * z);
                        if (n.aoa_sigma_rad > 0) m.noise_sigma = n.aoa_sigma_rad;
                        break;
                    case MetricKind::poa:
                        m.value = std::fmod(m.value + n.poa_sigma_rad * z, two_pi);
                        if (m.value < 0) m.value += two_pi;
                        if (m.value >= two_pi) m.value = 0.0;
                        if (n.poa_sigma_rad > 0)
                            m.noise_sigma = spec.wavelength_m * n.poa_sigma_rad / two_pi;
                        break;
                }
                trial.measurements.push_back(std::move(m));
            }
        }
        sc.trials.push_back(std::move(trial));
    }
    return sc;
}

void write_scenario(std::ostream& out, const Scenario& sc) {
    json rps = json::array();
    for (const auto& rp : sc.rps) rps.push_back(api::reference_point_json(rp));
    json header{{"type", "scenario"},
                {"seed", sc.seed},
                {"area_m", sc.area_m},
                {"rps", std::move(rps)},
                {"noise", noise_json(sc.noise)},
                {"metric_mix", mix_json(sc.metric_mix)},
                {"path_loss", api::path_loss_json(sc.path_loss)},
                {"wavelength_m", sc.wavelength_m},
                {"poa_k_max", sc.poa_k_max},
                {"trials", sc.trials.size()}};
    out << header.dump() << '\n';
    for (const auto& t : sc.trials) {
        json ms = json::array();
        for (const auto& m : t.measurements) ms.push_back(api::measurement_json(m));
        json line{{"type", "trial"},
                  {"trial", t.index},
                  {"truth", {t.truth.x(), t.truth.y()}},
                  {"measurements", std::move(ms)}};
        if (!t.rps.empty()) {
            json trps = json::array();
            for (const auto& rp : t.rps) trps.push_back(api::reference_point_json(rp));
            line["rps"] = std::move(trps);
        }
        out << line.dump() << '\n';
    }
}

Result<Scenario> read_scenario(std::istream& in) {
    std::string line;
    Scenario sc;
    bool header = false;
    std::size_t line_no = 0;
    std::size_t expected_trials = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto where = " (line " + std::to_string(line_no) + ")";
        auto j = json::parse(line, nullptr, false);
        if (!j.is_object() || !j.contains("type") || !j["type"].is_string())
            return invalid("malformed scenario line" + where);
        const auto type = j["type"].get<std::string>();
        if (!header) {
            if (type != "scenario") return invalid("scenario file must start with a header" + where);
            header = true;
            if (auto st = read_opt(j, "seed", sc.seed); !st) return st.error();
            if (auto st = read_opt(j, "area_m", sc.area_m); !st) return st.error();
            if (auto st = read_opt(j, "wavelength_m", sc.wavelength_m); !st) return st.error();
            if (auto st = read_opt(j, "poa_k_max", sc.poa_k_max); !st) return st.error();
            if (auto st = read_opt(j, "trials", expected_trials); !st) return st.error();
            auto rps = api::parse_reference_points(j.value("rps", json()));
            if (!rps) return invalid(rps.error().message + where);
            sc.rps = std::move(*rps);
            auto noise = parse_noise(j.value("noise", json::object()));
            if (!noise) return noise.error();
            sc.noise = *noise;
            auto mix = parse_mix(j.value("metric_mix", json()));
            if (!mix) return mix.error();
            sc.metric_mix = std::move(*mix);
            if (j.contains("path_loss")) {
                auto pl = api::parse_path_loss(j["path_loss"]);
                if (!pl) return invalid(pl.error().message + where);
                sc.path_loss = *pl;
            }
            if (sc.metric_mix.empty()) return invalid("metric_mix must not be empty");
            if (auto st = validate_geometry(sc.metric_mix, sc.rps.size()); !st) return st.error();
            continue;
        }
        if (type != "trial") return invalid("unexpected line type '" + type + "'" + where);
        Trial t;
        if (auto st = read_opt(j, "trial", t.index); !st) return st.error();
        if (!j.contains("truth") || !j["truth"].is_array() || j["truth"].size() != 2 ||
            !j["truth"][0].is_number() || !j["truth"][1].is_number())
            return invalid("'truth' must be [x, y]" + where);
        t.truth = {j["truth"][0].get<double>(), j["truth"][1].get<double>()};
        auto ms = api::parse_measurements(j.value("measurements", json()));
        if (!ms) return invalid(ms.error().message + where);
        t.measurements = std::move(*ms);
        if (j.contains("rps")) {
            auto rps = api::parse_reference_points(j["rps"]);
            if (!rps) return invalid(rps.error().message + where);
            t.rps = std::move(*rps);
        }
        sc.trials.push_back(std::move(t));
    }
    if (!header) return invalid("scenario file is empty");
    if (expected_trials != 0 && expected_trials != sc.trials.size())
        return invalid("scenario header announces " + std::to_string(expected_trials) +
                       " trials but the file has " + std::to_string(sc.trials.size()));
    return sc;
}

}  // namespace geosocial::sim
