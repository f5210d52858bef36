#pragma once

#include <json.hpp>

#include <vector>

#include "geosocial/ali/registry.hpp"
#include "geosocial/domain/model.hpp"
#include "geosocial/geoloc/estimators.hpp"
#include "geosocial/social/social_graph.hpp"
#include "geosocial/storage/store.hpp"

// JSON shapes used on the wire and in simulation files. Field names are
// snake_case; timestamps are RFC 3339 UTC strings.
namespace geosocial::api {

using nlohmann::json;

json error_json(const Error& e);

// Public profile view. The email is only included when include_email is set
// (the caller looking at their own profile).
json profile_json(const UserProfile& p, bool include_email);
json post_json(const Post& p);
json message_json(const Message& m);
json friendship_json(const Friendship& f);
json fix_json(const LocationFix& f);
json search_json(const SearchResult& r);
json location_json(const ali::CurrentLocation& loc);
json estimate_json(const geoloc::PositionEstimate& e);

json reference_point_json(const geoloc::ReferencePoint& rp);
json measurement_json(const geoloc::Measurement& m);
json path_loss_json(const geoloc::PathLossModel& m);

Result<geoloc::ReferencePoint> parse_reference_point(const json& j);
Result<geoloc::Measurement> parse_measurement(const json& j);
Result<geoloc::PathLossModel> parse_path_loss(const json& j);
Result<std::vector<geoloc::ReferencePoint>> parse_reference_points(const json& j);
Result<std::vector<geoloc::Measurement>> parse_measurements(const json& j);

}  // namespace geosocial::api
