#pragma once

#include <atomic>
#include <chrono>
#include <memory>
#include <semaphore>
#include <string>

#include "geosocial/ali/places.hpp"
#include "geosocial/common/result.hpp"

namespace geosocial::ali {

enum class PlaceSource { offline, external, offline_fallback };

std::string_view to_string(PlaceSource s) noexcept;

struct ResolvedPlace {
    Place place;
    PlaceSource source = PlaceSource::offline;
};

// Point -> place. Implementations never fail for reasons outside the
// dataset itself (an empty dataset or an out-of-bounds point).
class Geocoder {
public:
    virtual ~Geocoder() = default;
    virtual Result<ResolvedPlace> resolve(const GeodeticPoint& point) = 0;
};

class OfflineGeocoder final : public Geocoder {
public:
    explicit OfflineGeocoder(std::shared_ptr<const PlacesDataset> dataset);
    Result<ResolvedPlace> resolve(const GeodeticPoint& point) override;

private:
    std::shared_ptr<const PlacesDataset> dataset_;
};

struct ExternalGeocoderConfig {
    std::string base_url;  // http(s)://host[:port][/prefix]
    std::string key;
    std::chrono::milliseconds timeout{5000};
    int max_in_flight = 4;
};

// HTTP reverse geocoder speaking
//   GET {base_url}/reverse?lat=..&lon=..&key=..  ->  {"city": .., "country": ..}
// Any failure (connect, timeout, non-2xx, bad body) falls back to the local
// dataset and is counted in failures().
class ExternalGeocoder final : public Geocoder {
public:
    ExternalGeocoder(ExternalGeocoderConfig config, std::shared_ptr<const PlacesDataset> fallback);

    Result<ResolvedPlace> resolve(const GeodeticPoint& point) override;

    std::uint64_t failures() const noexcept { return failures_.load(); }
    std::uint64_t requests() const noexcept { return requests_.load(); }

private:
    Result<Place> query(const GeodeticPoint& point);

    ExternalGeocoderConfig config_;
    std::string scheme_host_port_;
    std::string path_prefix_;
    std::shared_ptr<const PlacesDataset> fallback_;
    std::counting_semaphore<64> in_flight_;
    std::atomic<std::uint64_t> failures_{0};
    std::atomic<std::uint64_t> requests_{0};
};

// Splits http(s)://host[:port][/prefix] into origin and path prefix.
Result<std::pair<std::string, std::string>> split_base_url(const std::string& url);

}  // namespace geosocial::ali
