#pragma once

#include <compare>
#include <cstdint>
#include <functional>

namespace geosocial {

// Strongly typed integer identifier. Values are assigned by storage and are
// monotonically increasing per table.
template <typename Tag>
struct Id {
    std::int64_t value = 0;

    constexpr Id() = default;
    constexpr explicit Id(std::int64_t v) : value(v) {}

    friend constexpr auto operator<=>(Id, Id) = default;
};

using UserId = Id<struct UserTag>;
using PostId = Id<struct PostTag>;
using MessageId = Id<struct MessageTag>;
using FixId = Id<struct FixTag>;

}  // namespace geosocial

template <typename Tag>
struct std::hash<geosocial::Id<Tag>> {
    std::size_t operator()(geosocial::Id<Tag> id) const noexcept {
        return std::hash<std::int64_t>{}(id.value);
    }
};
