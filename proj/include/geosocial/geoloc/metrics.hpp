#pragma once

#include <cmath>
#include <numbers>
#include <vector>

#include "geosocial/common/result.hpp"
#include "geosocial/geoloc/types.hpp"

namespace geosocial::geoloc {

inline constexpr double kSpeedOfLight = 299'792'458.0;  // m/s

template <typename Scalar>
Result<Scalar> toa_to_distance(Scalar seconds) {
    if (!std::isfinite(seconds)) return Error{ErrorCode::invalid_argument, "arrival time is not finite"};
    if (seconds < 0) return Error{ErrorCode::negative_time, "arrival time is negative"};
    return Scalar(kSpeedOfLight) * seconds;
}

template <typename Scalar>
Scalar distance_to_toa(Scalar meters) {
    return meters / Scalar(kSpeedOfLight);
}

template <typename Scalar>
Scalar rss_to_distance(Scalar rss_dbm, const BasicPathLossModel<Scalar>& model) {
    using std::pow;
    return model.d0_m * pow(Scalar(10), (model.p0_dbm - rss_dbm) / (Scalar(10) * model.exponent_n));
}

template <typename Scalar>
Scalar distance_to_rss(Scalar meters, const BasicPathLossModel<Scalar>& model) {
    using std::log10;
    return model.p0_dbm - Scalar(10) * model.exponent_n * log10(meters / model.d0_m);
}

// Integer-cycle ambiguity set d_k = (phase / 2pi + k) * wavelength, k = 0..k_max.
template <typename Scalar>
Result<std::vector<Scalar>> poa_to_distances(Scalar phase_rad, Scalar wavelength_m, int k_max) {
    constexpr Scalar two_pi = Scalar(2) * std::numbers::pi_v<Scalar>;
    if (!(phase_rad >= 0 && phase_rad < two_pi))
        return Error{ErrorCode::bad_phase, "carrier phase must lie in [0, 2*pi)"};
    if (!(wavelength_m > 0) || !std::isfinite(wavelength_m))
        return Error{ErrorCode::invalid_argument, "wavelength must be positive"};
    if (k_max < 0) return Error{ErrorCode::invalid_argument, "k_max must be non-negative"};
    std::vector<Scalar> out;
    out.reserve(static_cast<std::size_t>(k_max) + 1);
    const Scalar cycles = phase_rad / two_pi;
    for (int k = 0; k <= k_max; ++k) out.push_back((cycles + Scalar(k)) * wavelength_m);
    return out;
}

// Wraps an angle into [-pi, pi).
template <typename Scalar>
Scalar wrap_angle(Scalar a) {
    constexpr Scalar pi = std::numbers::pi_v<Scalar>;
    constexpr Scalar two_pi = Scalar(2) * pi;
    a = std::fmod(a + pi, two_pi);
    if (a < 0) a += two_pi;
    return a - pi;
}

}  // namespace geosocial::geoloc
