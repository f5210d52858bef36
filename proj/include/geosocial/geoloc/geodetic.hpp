#pragma once

namespace geosocial {

// WGS84-style latitude/longitude in degrees on a spherical earth.
struct GeodeticPoint {
    double lat_deg = 0.0;
    double lon_deg = 0.0;

    bool in_bounds() const noexcept {
        return lat_deg >= -90.0 && lat_deg <= 90.0 && lon_deg >= -180.0 && lon_deg <= 180.0;
    }

    friend bool operator==(const GeodeticPoint&, const GeodeticPoint&) = default;
};

inline constexpr double kEarthRadiusM = 6'371'000.0;

}  // namespace geosocial
