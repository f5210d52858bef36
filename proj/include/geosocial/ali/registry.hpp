#pragma once

#include <memory>
#include <vector>

#include "geosocial/ali/geocoder.hpp"
#include "geosocial/common/clock.hpp"
#include "geosocial/storage/store.hpp"

namespace geosocial::ali {

struct CurrentLocation {
    LocationFix fix;
    Place place;
    PlaceSource place_source = PlaceSource::offline;
};

// Automatic Location Identification registry: per-user fix history and the
// "where is my friend now" view. A user's fixes are visible to the user and
// to accepted friends only.
class AliRegistry {
public:
    AliRegistry(std::shared_ptr<Store> store, std::shared_ptr<const Clock> clock,
                std::shared_ptr<Geocoder> geocoder);

    // Appends a fix stamped with the current time, never earlier than the
    // user's previous fix.
    Result<FixId> record_fix(UserId user, const GeodeticPoint& point, double rms_residual_m,
                             FixSource source);

    Result<CurrentLocation> current_location(UserId requester, UserId target);

    // Fixes with from <= recorded_at <= to, ascending.
    Result<std::vector<LocationFix>> location_history(UserId requester, UserId target,
                                                      Timestamp from, Timestamp to);

    Geocoder& geocoder() noexcept { return *geocoder_; }

private:
    std::shared_ptr<Store> store_;
    std::shared_ptr<const Clock> clock_;
    std::shared_ptr<Geocoder> geocoder_;
};

}  // namespace geosocial::ali
