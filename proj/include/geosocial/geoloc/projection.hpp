#pragma once

#include <cmath>
#include <numbers>

#include "geosocial/common/result.hpp"
#include "geosocial/geoloc/geodetic.hpp"
#include "geosocial/geoloc/types.hpp"

namespace geosocial::geoloc {

// Equirectangular projection about an origin:
//   x = R cos(lat0) dlon,  y = R dlat   (radians, R = 6,371 km)
// Usable for local frames a few tens of kilometers across, away from the poles.
inline constexpr double kMaxProjectionLatDeg = 89.0;

namespace detail {

inline double deg_to_rad(double d) { return d * std::numbers::pi / 180.0; }
inline double rad_to_deg(double r) { return r * 180.0 / std::numbers::pi; }

// Into [-180, 180]. In-range values pass through untouched.
inline double normalize_lon(double lon) {
    if (lon >= -180.0 && lon <= 180.0) return lon;
    lon = std::fmod(lon + 180.0, 360.0);
    if (lon < 0) lon += 360.0;
    return lon - 180.0;
}

inline Status check_origin(const GeodeticPoint& origin) {
    if (!origin.in_bounds()) return Error{ErrorCode::out_of_bounds, "origin outside lat/lon bounds"};
    if (std::abs(origin.lat_deg) >= kMaxProjectionLatDeg)
        return Error{ErrorCode::polar_region, "projection is not valid within 1 degree of a pole"};
    return {};
}

}  // namespace detail

template <typename Scalar>
Result<GeodeticPoint> local_to_geodetic(const Vector2<Scalar>& xy, const GeodeticPoint& origin) {
    if (auto st = detail::check_origin(origin); !st) return st.error();
    if (!xy.allFinite()) return Error{ErrorCode::invalid_argument, "local coordinates not finite"};
    const double lat0 = detail::deg_to_rad(origin.lat_deg);
    const double dlat = static_cast<double>(xy.y()) / kEarthRadiusM;
    const double dlon = static_cast<double>(xy.x()) / (kEarthRadiusM * std::cos(lat0));
    GeodeticPoint p{origin.lat_deg + detail::rad_to_deg(dlat),
                    detail::normalize_lon(origin.lon_deg + detail::rad_to_deg(dlon))};
    if (std::abs(p.lat_deg) >= kMaxProjectionLatDeg)
        return Error{ErrorCode::polar_region, "projected point falls in the polar region"};
    return p;
}

template <typename Scalar = double>
Result<Vector2<Scalar>> geodetic_to_local(const GeodeticPoint& p, const GeodeticPoint& origin) {
    if (auto st = detail::check_origin(origin); !st) return st.error();
    if (!p.in_bounds()) return Error{ErrorCode::out_of_bounds, "point outside lat/lon bounds"};
    if (std::abs(p.lat_deg) >= kMaxProjectionLatDeg)
        return Error{ErrorCode::polar_region, "projection is not valid within 1 degree of a pole"};
    const double lat0 = detail::deg_to_rad(origin.lat_deg);
    const double dlat = detail::deg_to_rad(p.lat_deg - origin.lat_deg);
    const double dlon = detail::deg_to_rad(detail::normalize_lon(p.lon_deg - origin.lon_deg));
    return Vector2<Scalar>(Scalar(kEarthRadiusM * std::cos(lat0) * dlon),
                           Scalar(kEarthRadiusM * dlat));
}

}  // namespace geosocial::geoloc
