#pragma once

#include <Eigen/Core>

#include <istream>
#include <string>
#include <vector>

#include "geosocial/common/result.hpp"
#include "geosocial/geoloc/geodetic.hpp"

namespace geosocial::ali {

struct Place {
    std::string city;
    std::string country;
    double distance_to_city_center_m = 0.0;

    friend bool operator==(const Place&, const Place&) = default;
};

struct PlaceRow {
    std::string city;
    std::string country;
    GeodeticPoint point;
};

// Great-circle distance on a sphere of radius kEarthRadiusM.
double haversine_m(const GeodeticPoint& a, const GeodeticPoint& b) noexcept;

// Nearest-city lookup table loaded from `city,country,lat,lon` CSV.
class PlacesDataset {
public:
    static Result<PlacesDataset> load(const std::string& path);
    static Result<PlacesDataset> parse(std::istream& in);
    // Validates bounds and (city, country) uniqueness; rejects empty input.
    static Result<PlacesDataset> from_rows(std::vector<PlaceRow> rows);

    const std::vector<PlaceRow>& rows() const noexcept { return rows_; }
    std::size_t size() const noexcept { return rows_.size(); }

    // Row minimizing haversine distance; exact ties go to the smaller
    // (country, city) pair.
    Result<Place> reverse_geocode(const GeodeticPoint& point) const;

private:
    std::vector<PlaceRow> rows_;
    Eigen::Matrix3Xd unit_;  // rows as unit vectors on the sphere
};

Result<Place> reverse_geocode(const GeodeticPoint& point, const PlacesDataset& dataset);

}  // namespace geosocial::ali
