#include "geosocial/ali/registry.hpp"

namespace geosocial::ali {

namespace {

// Self, or an accepted friendship in either direction.
Result<bool> may_view(Transaction& tx, UserId requester, UserId target) {
    if (requester == target) return true;
    auto f = tx.get_friendship(requester, target);
    if (!f) {
        if (f.code() == ErrorCode::not_found) return false;
        return f.error();
    }
    return f->state == FriendshipState::accepted;
}

Error not_permitted() {
    return {ErrorCode::not_permitted, "location is visible to the user and their friends only"};
}

}  // namespace

AliRegistry::AliRegistry(std::shared_ptr<Store> store, std::shared_ptr<const Clock> clock,
                         std::shared_ptr<Geocoder> geocoder)
    : store_(std::move(store)), clock_(std::move(clock)), geocoder_(std::move(geocoder)) {}

Result<FixId> AliRegistry::record_fix(UserId user, const GeodeticPoint& point,
                                      double rms_residual_m, FixSource source) {
    if (!point.in_bounds()) return Error{ErrorCode::out_of_bounds, "latitude/longitude out of range"};
    if (!std::isfinite(rms_residual_m) || rms_residual_m < 0)
        return Error{ErrorCode::invalid_argument, "residual must be finite and non-negative"};
    return store_->transact([&](Transaction& tx) -> Result<FixId> {
        auto exists = tx.user_exists(user);
        if (!exists) return exists.error();
        if (!*exists) return Error{ErrorCode::unknown_user, "no such user"};
        auto latest = tx.latest_fix(user);
        if (!latest) return latest.error();
        auto recorded_at = clock_->now();
        if (*latest && (*latest)->recorded_at > recorded_at) recorded_at = (*latest)->recorded_at;
        return tx.put_fix(LocationFix{FixId{}, user, point, rms_residual_m, recorded_at, source});
    });
}

Result<CurrentLocation> AliRegistry::current_location(UserId requester, UserId target) {
    auto fix = store_->transact([&](Transaction& tx) -> Result<LocationFix> {
        auto allowed = may_view(tx, requester, target);
        if (!allowed) return allowed.error();
        if (!*allowed) return not_permitted();
        auto latest = tx.latest_fix(target);
        if (!latest) return latest.error();
        if (!*latest) return Error{ErrorCode::no_fix_yet, "no location has been recorded yet"};
        return **latest;
    });
    if (!fix) return fix.error();
    // Geocode outside the transaction; the external client may block for seconds.
    auto resolved = geocoder_->resolve(fix->point);
    if (!resolved) return resolved.error();
    return CurrentLocation{std::move(*fix), std::move(resolved->place), resolved->source};
}

Result<std::vector<LocationFix>> AliRegistry::location_history(UserId requester, UserId target,
                                                               Timestamp from, Timestamp to) {
    if (from > to) return Error{ErrorCode::bad_range, "range start is after its end"};
    return store_->transact([&](Transaction& tx) -> Result<std::vector<LocationFix>> {
        auto allowed = may_view(tx, requester, target);
        if (!allowed) return allowed.error();
        if (!*allowed) return not_permitted();
        return tx.list_fixes(target, from, to);
    });
}

}  // namespace geosocial::ali
