#pragma once

#include <Eigen/Core>

#include <cmath>
#include <optional>
#include <string>
#include <string_view>

namespace geosocial::geoloc {

template <typename Scalar>
using Vector2 = Eigen::Matrix<Scalar, 2, 1>;

// Infrastructure node at a known planar position (meters, local ENU frame).
template <typename Scalar>
struct BasicReferencePoint {
    std::string rp_id;
    Vector2<Scalar> position = Vector2<Scalar>::Zero();
};

enum class MetricKind { toa, rss, aoa, poa };

std::string_view to_string(MetricKind kind) noexcept;
std::optional<MetricKind> parse_metric_kind(std::string_view text) noexcept;

// One observation reported by a reference point about the mobile terminal.
//   toa: arrival time, seconds
//   rss: received power, dBm
//   aoa: bearing, radians counterclockwise from +x
//   poa: carrier phase, radians in [0, 2*pi)
// noise_sigma is the standard deviation of the derived observation: meters
// for distance-type metrics, radians for bearings.
template <typename Scalar>
struct BasicMeasurement {
    std::string rp_id;
    MetricKind kind = MetricKind::toa;
    Scalar value = 0;
    std::optional<Scalar> noise_sigma;
};

// Log-distance path loss: rss(d) = p0 - 10 n log10(d / d0).
template <typename Scalar>
struct BasicPathLossModel {
    Scalar p0_dbm = Scalar(-40);
    Scalar d0_m = Scalar(1);
    Scalar exponent_n = Scalar(2);

    bool valid() const noexcept {
        return std::isfinite(p0_dbm) && std::isfinite(d0_m) && std::isfinite(exponent_n) &&
               d0_m > 0 && exponent_n > 0;
    }
};

template <typename Scalar>
struct BasicPositionEstimate {
    Vector2<Scalar> position = Vector2<Scalar>::Zero();
    // RMS of the unweighted residuals in meters; bearing residuals enter as
    // their cross-track distance at the estimated range.
    Scalar rms_residual_m = 0;
    // Weighted least-squares objective at the solution.
    Scalar cost = 0;
    Scalar gradient_norm = 0;
    int iterations = 0;
    bool converged = false;
    int used_measurements = 0;
    // Set when phase observations were discarded because the integer-cycle
    // search space was too large.
    bool poa_dropped = false;
};

using ReferencePoint = BasicReferencePoint<double>;
using Measurement = BasicMeasurement<double>;
using PathLossModel = BasicPathLossModel<double>;
using PositionEstimate = BasicPositionEstimate<double>;

inline std::string_view to_string(MetricKind kind) noexcept {
    switch (kind) {
        case MetricKind::toa: return "TOA";
        case MetricKind::rss: return "RSS";
        case MetricKind::aoa: return "AOA";
        case MetricKind::poa: return "POA";
    }
    return "TOA";
}

inline std::optional<MetricKind> parse_metric_kind(std::string_view text) noexcept {
    if (text == "TOA" || text == "toa") return MetricKind::toa;
    if (text == "RSS" || text == "rss") return MetricKind::rss;
    if (text == "AOA" || text == "aoa") return MetricKind::aoa;
    if (text == "POA" || text == "poa") return MetricKind::poa;
    return std::nullopt;
}

}  // namespace geosocial::geoloc
