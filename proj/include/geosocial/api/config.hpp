#pragma once

#include <functional>
#include <optional>
#include <string>

#include "geosocial/ali/geocoder.hpp"
#include "geosocial/common/result.hpp"

namespace geosocial::api {

enum class GeocoderMode { offline, external };

struct ServiceConfig {
    std::string bind_address = "127.0.0.1:8080";  // host:port; port 0 picks a free one
    std::string db_path = "geosocial.db";
    std::string places_dataset_path = "data/places.csv";
    GeocoderMode geocoder_mode = GeocoderMode::offline;
    ali::ExternalGeocoderConfig external_geocoder{};
    int session_ttl_h = 24;
    int pbkdf2_iterations = 120'000;
    int worker_threads = 8;
};

struct BindAddress {
    std::string host;
    int port = 0;
};

Result<BindAddress> parse_bind_address(const std::string& text);

// Reads a JSON config file whose keys mirror ServiceConfig:
//   bind_address, db_path, places_dataset_path, geocoder_mode,
//   external_geocoder{base_url, key, timeout_s, max_in_flight},
//   session_ttl_h, pbkdf2_iterations, worker_threads
Result<ServiceConfig> load_config_file(const std::string& path, ServiceConfig base = {});
Result<ServiceConfig> parse_config_json(const std::string& text, ServiceConfig base = {});

using EnvLookup = std::function<std::optional<std::string>(const char*)>;

// Overlays GEOSOCIAL_* environment variables (see README for the list).
Result<ServiceConfig> apply_environment(ServiceConfig config, const EnvLookup& env);
std::optional<std::string> process_env(const char* name);

Status validate(const ServiceConfig& config);

}  // namespace geosocial::api
