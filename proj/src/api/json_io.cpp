#include "geosocial/api/json_io.hpp"

namespace geosocial::api {

namespace {

Error bad(std::string msg) { return {ErrorCode::bad_request, std::move(msg)}; }

Result<double> number_field(const json& j, const char* key) {
    if (!j.contains(key) || !j[key].is_number()) return bad(std::string("'") + key + "' must be a number");
    return j[key].get<double>();
}

}  // namespace

json error_json(const Error& e) {
    json j{{"code", to_string(e.code)}, {"message", e.message}};
    if (!e.detail.empty()) j["detail"] = e.detail;
    return j;
}

json profile_json(const UserProfile& p, bool include_email) {
    json j{{"user_id", p.user_id.value},
           {"first_name", p.first_name},
           {"last_name", p.last_name},
           {"display_name", p.display_name()},
           {"country", p.country},
           {"gender", p.gender},
           {"date_of_birth", format_date(p.date_of_birth)},
           {"created_at", format_rfc3339(p.created_at)}};
    if (include_email) j["email"] = p.email.str();
    return j;
}

json post_json(const Post& p) {
    json j{{"post_id", p.post_id.value},
           {"author_id", p.author_id.value},
           {"body", p.body},
           {"created_at", format_rfc3339(p.created_at)}};
    j["media_ref"] = p.media_ref ? json(*p.media_ref) : json(nullptr);
    return j;
}

json message_json(const Message& m) {
    return {{"message_id", m.message_id.value},
            {"sender_id", m.sender_id.value},
            {"recipient_id", m.recipient_id.value},
            {"body", m.body},
            {"sent_at", format_rfc3339(m.sent_at)},
            {"seq", m.seq}};
}

json friendship_json(const Friendship& f) {
    return {{"requester_id", f.requester_id.value},
            {"addressee_id", f.addressee_id.value},
            {"state", to_string(f.state)},
            {"updated_at", format_rfc3339(f.updated_at)}};
}

json fix_json(const LocationFix& f) {
    return {{"fix_id", f.fix_id.value},
            {"user_id", f.user_id.value},
            {"lat", f.point.lat_deg},
            {"lon", f.point.lon_deg},
            {"rms_residual_m", f.rms_residual_m},
            {"recorded_at", format_rfc3339(f.recorded_at)},
            {"source", to_string(f.source)}};
}

json search_json(const SearchResult& r) {
    json matches = json::array();
    for (const auto& m : r.matches)
        matches.push_back(
            {{"user_id", m.user_id.value}, {"display_name", m.display_name}, {"country", m.country}});
    return {{"matches", std::move(matches)}};
}

json location_json(const ali::CurrentLocation& loc) {
    return {{"user_id", loc.fix.user_id.value},
            {"lat", loc.fix.point.lat_deg},
            {"lon", loc.fix.point.lon_deg},
            {"city", loc.place.city},
            {"country", loc.place.country},
            {"distance_to_city_center_m", loc.place.distance_to_city_center_m},
            {"recorded_at", format_rfc3339(loc.fix.recorded_at)},
            {"source", to_string(loc.fix.source)},
            {"place_source", ali::to_string(loc.place_source)}};
}

json estimate_json(const geoloc::PositionEstimate& e) {
    return {{"x", e.position.x()},
            {"y", e.position.y()},
            {"rms_residual_m", e.rms_residual_m},
            {"cost", e.cost},
            {"iterations", e.iterations},
            {"converged", e.converged},
            {"used_measurements", e.used_measurements},
            {"poa_dropped", e.poa_dropped}};
}

json reference_point_json(const geoloc::ReferencePoint& rp) {
    return {{"rp_id", rp.rp_id}, {"x", rp.position.x()}, {"y", rp.position.y()}};
}

json measurement_json(const geoloc::Measurement& m) {
    json j{{"rp_id", m.rp_id}, {"kind", geoloc::to_string(m.kind)}, {"value", m.value}};
    if (m.noise_sigma) j["noise_sigma"] = *m.noise_sigma;
    return j;
}

json path_loss_json(const geoloc::PathLossModel& m) {
    return {{"p0_dbm", m.p0_dbm}, {"d0_m", m.d0_m}, {"exponent_n", m.exponent_n}};
}

Result<geoloc::ReferencePoint> parse_reference_point(const json& j) {
    if (!j.is_object()) return bad("reference point must be an object");
    if (!j.contains("rp_id") || !j["rp_id"].is_string()) return bad("'rp_id' must be a string");
    auto x = number_field(j, "x");
    if (!x) return x.error();
    auto y = number_field(j, "y");
    if (!y) return y.error();
    return geoloc::ReferencePoint{j["rp_id"].get<std::string>(), {*x, *y}};
}

Result<geoloc::Measurement> parse_measurement(const json& j) {
    if (!j.is_object()) return bad("measurement must be an object");
    if (!j.contains("rp_id") || !j["rp_id"].is_string()) return bad("'rp_id' must be a string");
    if (!j.contains("kind") || !j["kind"].is_string()) return bad("'kind' must be a string");
    auto kind = geoloc::parse_metric_kind(j["kind"].get<std::string>());
    if (!kind) return bad("'kind' must be one of TOA, RSS, AOA, POA");
    auto value = number_field(j, "value");
    if (!value) return value.error();
    geoloc::Measurement m{j["rp_id"].get<std::string>(), *kind, *value, std::nullopt};
    if (j.contains("noise_sigma") && !j["noise_sigma"].is_null()) {
        auto s = number_field(j, "noise_sigma");
        if (!s) return s.error();
        m.noise_sigma = *s;
    }
    return m;
}

Result<geoloc::PathLossModel> parse_path_loss(const json& j) {
    if (!j.is_object()) return bad("path_loss must be an object");
    geoloc::PathLossModel m;
    auto p0 = number_field(j, "p0_dbm");
    auto d0 = number_field(j, "d0_m");
    auto n = number_field(j, "exponent_n");
    if (!p0) return p0.error();
    if (!d0) return d0.error();
    if (!n) return n.error();
    m = {*p0, *d0, *n};
    if (!m.valid()) return Error{ErrorCode::invalid_argument, "path_loss needs d0_m > 0 and exponent_n > 0"};
    return m;
}

Result<std::vector<geoloc::ReferencePoint>> parse_reference_points(const json& j) {
    if (!j.is_array()) return bad("'rps' must be an array");
    std::vector<geoloc::ReferencePoint> out;
    for (const auto& e : j) {
        auto rp = parse_reference_point(e);
        if (!rp) return rp.error();
        out.push_back(std::move(*rp));
    }
    return out;
}

Result<std::vector<geoloc::Measurement>> parse_measurements(const json& j) {
    if (!j.is_array()) return bad("'measurements' must be an array");
    std::vector<geoloc::Measurement> out;
    for (const auto& e : j) {
        auto m = parse_measurement(e);
        if (!m) return m.error();
        out.push_back(std::move(*m));
    }
    return out;
}

}  // namespace geosocial::api
