#include "geosocial/ali/places.hpp"

#include <Eigen/Dense>

#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <tuple>

namespace geosocial::ali {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;
// Dot-product slack for the exact haversine refinement; far above the
// rounding error of a unit-vector dot product.
constexpr double kDotSlack = 1e-12;

Eigen::Vector3d unit_vector(const GeodeticPoint& p) {
    const double lat = p.lat_deg * kDeg, lon = p.lon_deg * kDeg;
    return {std::cos(lat) * std::cos(lon), std::cos(lat) * std::sin(lon), std::sin(lat)};
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields(1);
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                fields.back() += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                fields.back() += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.emplace_back();
        } else {
            fields.back() += c;
        }
    }
    return fields;
}

bool parse_double(const std::string& s, double& out) {
    auto first = s.data(), last = s.data() + s.size();
    while (first != last && *first == ' ') ++first;
    while (last != first && last[-1] == ' ') --last;
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc{} && ptr == last && std::isfinite(out);
}

}  // namespace

double haversine_m(const GeodeticPoint& a, const GeodeticPoint& b) noexcept {
    const double dlat = (b.lat_deg - a.lat_deg) * kDeg;
    const double dlon = (b.lon_deg - a.lon_deg) * kDeg;
    const double s1 = std::sin(dlat / 2), s2 = std::sin(dlon / 2);
    double h = s1 * s1 + std::cos(a.lat_deg * kDeg) * std::cos(b.lat_deg * kDeg) * s2 * s2;
    h = std::min(1.0, std::max(0.0, h));
    return 2.0 * kEarthRadiusM * std::asin(std::sqrt(h));
}

Result<PlacesDataset> PlacesDataset::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) return Error{ErrorCode::io, "cannot open places dataset: " + path};
    return parse(in);
}

Result<PlacesDataset> PlacesDataset::parse(std::istream& in) {
    std::string line;
    std::size_t line_no = 0;
    std::vector<PlaceRow> rows;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line_no == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
        if (line.empty()) continue;
        auto fields = split_csv_line(line);
        if (!header_seen) {
            if (fields != std::vector<std::string>{"city", "country", "lat", "lon"})
                return Error{ErrorCode::malformed, "places header must be city,country,lat,lon"};
            header_seen = true;
            continue;
        }
        const auto where = " (line " + std::to_string(line_no) + ")";
        if (fields.size() != 4)
            return Error{ErrorCode::malformed, "expected 4 fields" + where};
        PlaceRow row{fields[0], fields[1], {}};
        if (!parse_double(fields[2], row.point.lat_deg) ||
            !parse_double(fields[3], row.point.lon_deg))
            return Error{ErrorCode::malformed, "bad coordinate" + where};
        rows.push_back(std::move(row));
    }
    if (!header_seen) return Error{ErrorCode::empty_dataset, "places dataset is empty"};
    return from_rows(std::move(rows));
}

Result<PlacesDataset> PlacesDataset::from_rows(std::vector<PlaceRow> rows) {
    if (rows.empty()) return Error{ErrorCode::empty_dataset, "places dataset is empty"};
    std::set<std::pair<std::string, std::string>> seen;
    for (const auto& r : rows) {
        if (r.city.empty() || r.country.empty())
            return Error{ErrorCode::malformed, "city and country must be non-empty"};
        if (!r.point.in_bounds())
            return Error{ErrorCode::out_of_bounds, "coordinates out of bounds for " + r.city};
        if (!seen.emplace(r.country, r.city).second)
            return Error{ErrorCode::malformed, "duplicate place: " + r.city + ", " + r.country};
    }
    PlacesDataset ds;
    ds.unit_.resize(3, static_cast<Eigen::Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i)
        ds.unit_.col(static_cast<Eigen::Index>(i)) = unit_vector(rows[i].point);
    ds.rows_ = std::move(rows);
    return ds;
}

Result<Place> PlacesDataset::reverse_geocode(const GeodeticPoint& point) const {
    if (rows_.empty()) return Error{ErrorCode::empty_dataset, "places dataset is empty"};
    if (!point.in_bounds()) return Error{ErrorCode::out_of_bounds, "point outside lat/lon bounds"};

    // Chord length is monotone in great-circle distance, so the largest dot
    // product is the nearest row. Near-ties are settled on exact haversine.
    const Eigen::VectorXd dots = unit_.transpose() * unit_vector(point);
    const double best_dot = dots.maxCoeff();

    const PlaceRow* best = nullptr;
    double best_dist = 0;
    for (Eigen::Index i = 0; i < dots.size(); ++i) {
        if (dots(i) < best_dot - kDotSlack) continue;
        const auto& row = rows_[static_cast<std::size_t>(i)];
        const double d = haversine_m(point, row.point);
        if (!best || d < best_dist ||
            (d == best_dist &&
             std::tie(row.country, row.city) < std::tie(best->country, best->city))) {
            best = &row;
            best_dist = d;
        }
    }
    return Place{best->city, best->country, best_dist};
}

Result<Place> reverse_geocode(const GeodeticPoint& point, const PlacesDataset& dataset) {
    return dataset.reverse_geocode(point);
}

}  // namespace geosocial::ali
