#include "geosocial/domain/model.hpp"

#include <algorithm>
#include <cctype>

namespace geosocial {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

Error malformed_email() { return {ErrorCode::malformed, "email address is malformed"}; }

}  // namespace

std::string_view to_string(FriendshipState s) noexcept {
    switch (s) {
        case FriendshipState::pending: return "pending";
        case FriendshipState::accepted: return "accepted";
        case FriendshipState::rejected: return "rejected";
    }
    return "pending";
}

std::optional<FriendshipState> parse_friendship_state(std::string_view s) noexcept {
    if (s == "pending") return FriendshipState::pending;
    if (s == "accepted") return FriendshipState::accepted;
    if (s == "rejected") return FriendshipState::rejected;
    return std::nullopt;
}

Result<EmailAddress> EmailAddress::parse(std::string_view raw) {
    const auto at = raw.find('@');
    if (at == std::string_view::npos || raw.find('@', at + 1) != std::string_view::npos)
        return malformed_email();
    const auto local = raw.substr(0, at);
    const auto domain = raw.substr(at + 1);
    if (local.empty() || domain.empty()) return malformed_email();
    const auto has_space = [](std::string_view s) {
        return std::any_of(s.begin(), s.end(),
                           [](unsigned char c) { return std::isspace(c) || std::iscntrl(c); });
    };
    if (has_space(local) || has_space(domain)) return malformed_email();
    // The domain needs a dot with a non-empty label on each side of every dot.
    if (domain.find('.') == std::string_view::npos || domain.front() == '.' ||
        domain.back() == '.' || domain.find("..") != std::string_view::npos)
        return malformed_email();

    std::string value(local);
    value += '@';
    std::transform(domain.begin(), domain.end(), std::back_inserter(value),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return EmailAddress(std::move(value));
}

Result<EmailAddress> validate_email(std::string_view raw) { return EmailAddress::parse(raw); }

std::size_t utf8_length(std::string_view text) noexcept {
    std::size_t n = 0;
    for (unsigned char c : text)
        if ((c & 0xC0) != 0x80) ++n;
    return n;
}

Status validate_password(std::string_view raw) {
    if (utf8_length(raw) < kMinPasswordLength)
        return Error{ErrorCode::too_short, "password must be at least 9 characters"};
    return {};
}

Result<UserProfile> build_profile(const SignupFields& fields, Timestamp now) {
    const auto require = [](const std::optional<std::string>& v,
                            const char* name) -> Result<std::string> {
        if (!v || trim(*v).empty())
            return Error{ErrorCode::missing_field, std::string("missing field: ") + name, name};
        return std::string(trim(*v));
    };

    auto first = require(fields.first_name, "first_name");
    if (!first) return first.error();
    auto last = require(fields.last_name, "last_name");
    if (!last) return last.error();
    auto email_raw = require(fields.email, "email");
    if (!email_raw) return email_raw.error();
    if (!fields.password || fields.password->empty())
        return Error{ErrorCode::missing_field, "missing field: password", "password"};
    auto country = require(fields.country, "country");
    if (!country) return country.error();
    auto gender = require(fields.gender, "gender");
    if (!gender) return gender.error();
    auto dob_raw = require(fields.date_of_birth, "date_of_birth");
    if (!dob_raw) return dob_raw.error();

    auto email = validate_email(*email_raw);
    if (!email) return email.error();
    if (auto pw = validate_password(*fields.password); !pw) return pw.error();

    const auto dob = parse_date(*dob_raw);
    if (!dob) return Error{ErrorCode::invalid_dob, "date of birth must be YYYY-MM-DD"};
    const std::chrono::year_month_day today{std::chrono::floor<std::chrono::days>(now)};
    if (std::chrono::sys_days{*dob} > std::chrono::sys_days{today})
        return Error{ErrorCode::invalid_dob, "date of birth is in the future"};

    return UserProfile{UserId{},
                       std::move(*first),
                       std::move(*last),
                       std::move(*email),
                       std::move(*country),
                       std::move(*gender),
                       *dob,
                       now};
}

}  // namespace geosocial
