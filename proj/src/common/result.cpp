#include "geosocial/common/result.hpp"

namespace geosocial {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::malformed: return "malformed";
        case ErrorCode::too_short: return "too_short";
        case ErrorCode::missing_field: return "missing_field";
        case ErrorCode::invalid_dob: return "invalid_dob";
        case ErrorCode::invalid_argument: return "invalid_argument";
        case ErrorCode::bad_request: return "bad_request";
        case ErrorCode::empty_query: return "empty_query";
        case ErrorCode::empty: return "empty";
        case ErrorCode::empty_body: return "empty_body";
        case ErrorCode::self_friend: return "self_friend";
        case ErrorCode::bad_range: return "bad_range";
        case ErrorCode::out_of_bounds: return "out_of_bounds";
        case ErrorCode::duplicate_email: return "duplicate_email";
        case ErrorCode::bad_credentials: return "bad_credentials";
        case ErrorCode::invalid_token: return "invalid_token";
        case ErrorCode::expired: return "expired";
        case ErrorCode::unauthorized: return "unauthorized";
        case ErrorCode::unknown_user: return "unknown_user";
        case ErrorCode::already_exists: return "already_exists";
        case ErrorCode::not_pending: return "not_pending";
        case ErrorCode::not_addressee: return "not_addressee";
        case ErrorCode::not_friends: return "not_friends";
        case ErrorCode::not_participant: return "not_participant";
        case ErrorCode::no_fix_yet: return "no_fix_yet";
        case ErrorCode::not_permitted: return "not_permitted";
        case ErrorCode::empty_dataset: return "empty_dataset";
        case ErrorCode::negative_time: return "negative_time";
        case ErrorCode::bad_phase: return "bad_phase";
        case ErrorCode::insufficient_rps: return "insufficient_rps";
        case ErrorCode::collinear_rps: return "collinear_rps";
        case ErrorCode::parallel_bearings: return "parallel_bearings";
        case ErrorCode::insufficient_observations: return "insufficient_observations";
        case ErrorCode::polar_region: return "polar_region";
        case ErrorCode::connectivity: return "connectivity";
        case ErrorCode::not_found: return "not_found";
        case ErrorCode::constraint: return "constraint";
        case ErrorCode::io: return "io";
        case ErrorCode::version_downgrade: return "version_downgrade";
        case ErrorCode::config: return "config";
        case ErrorCode::bind: return "bind";
        case ErrorCode::internal: return "internal";
    }
    return "internal";
}

}  // namespace geosocial
