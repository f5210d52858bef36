#include "geosocial/ali/geocoder.hpp"

#include <httplib.h>
#include <json.hpp>

#include <algorithm>
#include <charconv>

namespace geosocial::ali {

namespace {

std::string shortest(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

class SemaphoreGuard {
public:
    explicit SemaphoreGuard(std::counting_semaphore<64>& s) : s_(s) { s_.acquire(); }
    ~SemaphoreGuard() { s_.release(); }
    SemaphoreGuard(const SemaphoreGuard&) = delete;
    SemaphoreGuard& operator=(const SemaphoreGuard&) = delete;

private:
    std::counting_semaphore<64>& s_;
};

}  // namespace

std::string_view to_string(PlaceSource s) noexcept {
    switch (s) {
        case PlaceSource::offline: return "offline";
        case PlaceSource::external: return "external";
        case PlaceSource::offline_fallback: return "offline_fallback";
    }
    return "offline";
}

OfflineGeocoder::OfflineGeocoder(std::shared_ptr<const PlacesDataset> dataset)
    : dataset_(std::move(dataset)) {}

Result<ResolvedPlace> OfflineGeocoder::resolve(const GeodeticPoint& point) {
    auto place = dataset_->reverse_geocode(point);
    if (!place) return place.error();
    return ResolvedPlace{std::move(*place), PlaceSource::offline};
}

Result<std::pair<std::string, std::string>> split_base_url(const std::string& url) {
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos)
        return Error{ErrorCode::config, "base URL needs a scheme: " + url};
    const auto scheme = url.substr(0, scheme_end);
    if (scheme != "http" && scheme != "https")
        return Error{ErrorCode::config, "unsupported URL scheme: " + scheme};
    const auto path_start = url.find('/', scheme_end + 3);
    std::string origin = url.substr(0, path_start);
    std::string prefix = path_start == std::string::npos ? "" : url.substr(path_start);
    while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
    if (origin.size() <= scheme_end + 3) return Error{ErrorCode::config, "base URL has no host"};
    return std::pair{std::move(origin), std::move(prefix)};
}

ExternalGeocoder::ExternalGeocoder(ExternalGeocoderConfig config,
                                   std::shared_ptr<const PlacesDataset> fallback)
    : config_(std::move(config)),
      fallback_(std::move(fallback)),
      in_flight_(std::clamp(config_.max_in_flight, 1, 64)) {
    if (auto parts = split_base_url(config_.base_url)) {
        scheme_host_port_ = parts->first;
        path_prefix_ = parts->second;
    }
}

Result<Place> ExternalGeocoder::query(const GeodeticPoint& point) {
    if (scheme_host_port_.empty()) return Error{ErrorCode::config, "invalid base URL"};
    SemaphoreGuard guard(in_flight_);

    httplib::Client client(scheme_host_port_);
    const auto secs = std::chrono::duration_cast<std::chrono::seconds>(config_.timeout);
    const auto usecs =
        std::chrono::duration_cast<std::chrono::microseconds>(config_.timeout - secs);
    client.set_connection_timeout(secs.count(), usecs.count());
    client.set_read_timeout(secs.count(), usecs.count());
    client.set_write_timeout(secs.count(), usecs.count());

    const auto path = path_prefix_ + "/reverse?lat=" + shortest(point.lat_deg) +
                      "&lon=" + shortest(point.lon_deg) +
                      "&key=" + httplib::detail::encode_query_param(config_.key);
    auto res = client.Get(path);
    if (!res) return Error{ErrorCode::connectivity, httplib::to_string(res.error())};
    if (res->status < 200 || res->status >= 300)
        return Error{ErrorCode::connectivity, "geocoder returned HTTP " + std::to_string(res->status)};

    auto body = nlohmann::json::parse(res->body, nullptr, /*allow_exceptions=*/false);
    if (!body.is_object() || !body.contains("city") || !body.contains("country") ||
        !body["city"].is_string() || !body["country"].is_string())
        return Error{ErrorCode::malformed, "geocoder response is malformed"};
    Place place{body["city"].get<std::string>(), body["country"].get<std::string>(), 0.0};
    if (place.city.empty() || place.country.empty())
        return Error{ErrorCode::malformed, "geocoder response has empty names"};
    // The service reports names only; measure to the matching dataset row if we have one.
    for (const auto& row : fallback_->rows())
        if (row.city == place.city && row.country == place.country) {
            place.distance_to_city_center_m = haversine_m(point, row.point);
            break;
        }
    return place;
}

Result<ResolvedPlace> ExternalGeocoder::resolve(const GeodeticPoint& point) {
    ++requests_;
    if (!point.in_bounds()) return Error{ErrorCode::out_of_bounds, "point outside lat/lon bounds"};
    if (auto place = query(point)) return ResolvedPlace{std::move(*place), PlaceSource::external};
    ++failures_;
    auto place = fallback_->reverse_geocode(point);
    if (!place) return place.error();
    return ResolvedPlace{std::move(*place), PlaceSource::offline_fallback};
}

}  // namespace geosocial::ali
