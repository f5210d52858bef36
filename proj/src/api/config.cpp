#include "geosocial/api/config.hpp"

#include <json.hpp>

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace geosocial::api {

using nlohmann::json;

namespace {

Error config_error(std::string msg) { return {ErrorCode::config, std::move(msg)}; }

Result<GeocoderMode> parse_mode(const std::string& s) {
    if (s == "offline") return GeocoderMode::offline;
    if (s == "external") return GeocoderMode::external;
    return config_error("geocoder_mode must be 'offline' or 'external'");
}

template <typename T>
Status read_field(const json& j, const char* key, T& out) {
    if (!j.contains(key)) return {};
    try {
        out = j.at(key).get<T>();
    } catch (const json::exception&) {
        return config_error(std::string("config field '") + key + "' has the wrong type");
    }
    return {};
}

std::chrono::milliseconds seconds_to_ms(double s) {
    return std::chrono::milliseconds(static_cast<std::int64_t>(s * 1000.0 + 0.5));
}

}  // namespace

Result<BindAddress> parse_bind_address(const std::string& text) {
    const auto colon = text.rfind(':');
    if (colon == std::string::npos || colon == 0 || colon + 1 == text.size())
        return config_error("bind address must be host:port, got '" + text + "'");
    BindAddress out{text.substr(0, colon), 0};
    const auto port = std::string_view(text).substr(colon + 1);
    auto [ptr, ec] = std::from_chars(port.data(), port.data() + port.size(), out.port);
    if (ec != std::errc{} || ptr != port.data() + port.size() || out.port < 0 || out.port > 65535)
        return config_error("invalid port in bind address '" + text + "'");
    return out;
}

Result<ServiceConfig> parse_config_json(const std::string& text, ServiceConfig cfg) {
    const auto j = json::parse(text, nullptr, false);
    if (!j.is_object()) return config_error("config file is not a JSON object");

    std::string mode;
    double timeout_s = -1;
    if (auto st = read_field(j, "bind_address", cfg.bind_address); !st) return st.error();
    if (auto st = read_field(j, "db_path", cfg.db_path); !st) return st.error();
    if (auto st = read_field(j, "places_dataset_path", cfg.places_dataset_path); !st)
        return st.error();
    if (auto st = read_field(j, "geocoder_mode", mode); !st) return st.error();
    if (auto st = read_field(j, "session_ttl_h", cfg.session_ttl_h); !st) return st.error();
    if (auto st = read_field(j, "pbkdf2_iterations", cfg.pbkdf2_iterations); !st) return st.error();
    if (auto st = read_field(j, "worker_threads", cfg.worker_threads); !st) return st.error();
    if (!mode.empty()) {
        auto m = parse_mode(mode);
        if (!m) return m.error();
        cfg.geocoder_mode = *m;
    }
    if (j.contains("external_geocoder")) {
        const auto& g = j["external_geocoder"];
        if (!g.is_object()) return config_error("external_geocoder must be an object");
        if (auto st = read_field(g, "base_url", cfg.external_geocoder.base_url); !st)
            return st.error();
        if (auto st = read_field(g, "key", cfg.external_geocoder.key); !st) return st.error();
        if (auto st = read_field(g, "timeout_s", timeout_s); !st) return st.error();
        if (auto st = read_field(g, "max_in_flight", cfg.external_geocoder.max_in_flight); !st)
            return st.error();
        if (timeout_s >= 0) cfg.external_geocoder.timeout = seconds_to_ms(timeout_s);
    }
    return cfg;
}

Result<ServiceConfig> load_config_file(const std::string& path, ServiceConfig base) {
    std::ifstream in(path);
    if (!in) return Error{ErrorCode::io, "cannot read config file: " + path};
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_json(ss.str(), std::move(base));
}

std::optional<std::string> process_env(const char* name) {
    if (const char* v = std::getenv(name)) return std::string(v);
    return std::nullopt;
}

Result<ServiceConfig> apply_environment(ServiceConfig cfg, const EnvLookup& env) {
    const auto to_int = [](const std::string& s, const char* name) -> Result<int> {
        int v = 0;
        auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc{} || ptr != s.data() + s.size())
            return config_error(std::string(name) + " must be an integer");
        return v;
    };
    if (auto v = env("GEOSOCIAL_BIND")) cfg.bind_address = *v;
    if (auto v = env("GEOSOCIAL_DB")) cfg.db_path = *v;
    if (auto v = env("GEOSOCIAL_PLACES")) cfg.places_dataset_path = *v;
    if (auto v = env("GEOSOCIAL_GEOCODER_MODE")) {
        auto m = parse_mode(*v);
        if (!m) return m.error();
        cfg.geocoder_mode = *m;
    }
    if (auto v = env("GEOSOCIAL_GEOCODER_URL")) cfg.external_geocoder.base_url = *v;
    if (auto v = env("GEOSOCIAL_GEOCODER_KEY")) cfg.external_geocoder.key = *v;
    if (auto v = env("GEOSOCIAL_GEOCODER_TIMEOUT_S")) {
        char* end = nullptr;
        const double s = std::strtod(v->c_str(), &end);
        if (end == v->c_str() || *end != '\0')
            return config_error("GEOSOCIAL_GEOCODER_TIMEOUT_S must be a number");
        cfg.external_geocoder.timeout = seconds_to_ms(s);
    }
    if (auto v = env("GEOSOCIAL_SESSION_TTL_H")) {
        auto n = to_int(*v, "GEOSOCIAL_SESSION_TTL_H");
        if (!n) return n.error();
        cfg.session_ttl_h = *n;
    }
    return cfg;
}

Status validate(const ServiceConfig& cfg) {
    if (auto b = parse_bind_address(cfg.bind_address); !b) return b.error();
    if (cfg.db_path.empty()) return config_error("db_path is required");
    if (cfg.places_dataset_path.empty()) return config_error("places_dataset_path is required");
    if (cfg.session_ttl_h <= 0) return config_error("session_ttl_h must be positive");
    if (cfg.pbkdf2_iterations < 1) return config_error("pbkdf2_iterations must be positive");
    if (cfg.worker_threads < 1) return config_error("worker_threads must be positive");
    if (cfg.geocoder_mode == GeocoderMode::external) {
        if (cfg.external_geocoder.base_url.empty())
            return config_error("external geocoder mode requires external_geocoder.base_url");
        if (cfg.external_geocoder.key.empty())
            return config_error("external geocoder mode requires external_geocoder.key");
        if (auto parts = ali::split_base_url(cfg.external_geocoder.base_url); !parts)
            return parts.error();
        if (cfg.external_geocoder.timeout.count() <= 0)
            return config_error("external_geocoder.timeout_s must be positive");
    }
    return {};
}

}  // namespace geosocial::api
