#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>

#include "geosocial/common/clock.hpp"
#include "geosocial/common/ids.hpp"
#include "geosocial/common/result.hpp"

namespace geosocial {

// local@domain where the domain contains a dot. The domain part is stored
// lowercased; the local part is kept as typed.
class EmailAddress {
public:
    static Result<EmailAddress> parse(std::string_view raw);

    const std::string& str() const noexcept { return value_; }

    friend bool operator==(const EmailAddress&, const EmailAddress&) = default;

private:
    explicit EmailAddress(std::string value) : value_(std::move(value)) {}
    std::string value_;
};

struct UserProfile {
    UserId user_id;
    std::string first_name;
    std::string last_name;
    EmailAddress email;
    std::string country;
    std::string gender;
    std::chrono::year_month_day date_of_birth;
    Timestamp created_at;

    std::string display_name() const { return first_name + " " + last_name; }

    friend bool operator==(const UserProfile&, const UserProfile&) = default;
};

struct Post {
    PostId post_id;
    UserId author_id;
    std::string body;
    std::optional<std::string> media_ref;
    Timestamp created_at;

    friend bool operator==(const Post&, const Post&) = default;
};

struct Message {
    MessageId message_id;
    UserId sender_id;
    UserId recipient_id;
    std::string body;
    Timestamp sent_at;
    std::int64_t seq = 0;

    friend bool operator==(const Message&, const Message&) = default;
};

enum class FriendshipState { pending, accepted, rejected };

std::string_view to_string(FriendshipState s) noexcept;
std::optional<FriendshipState> parse_friendship_state(std::string_view s) noexcept;

struct Friendship {
    UserId requester_id;
    UserId addressee_id;
    FriendshipState state = FriendshipState::pending;
    Timestamp updated_at;

    friend bool operator==(const Friendship&, const Friendship&) = default;
};

// Raw signup form. Absent optionals are missing fields.
struct SignupFields {
    std::optional<std::string> first_name;
    std::optional<std::string> last_name;
    std::optional<std::string> email;
    std::optional<std::string> password;
    std::optional<std::string> country;
    std::optional<std::string> gender;
    std::optional<std::string> date_of_birth;  // YYYY-MM-DD
};

inline constexpr std::size_t kMinPasswordLength = 9;

Result<EmailAddress> validate_email(std::string_view raw);
Status validate_password(std::string_view raw);

// Validates every signup field and assembles a profile. The id is left
// default; storage assigns the real one when the row is inserted.
Result<UserProfile> build_profile(const SignupFields& fields, Timestamp now);

// Number of Unicode code points in a UTF-8 string; invalid bytes count as one.
std::size_t utf8_length(std::string_view text) noexcept;

}  // namespace geosocial
