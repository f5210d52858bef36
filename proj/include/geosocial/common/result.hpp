#pragma once

#include <cassert>
#include <string>
#include <string_view>
#include <utility>
#include <variant>

namespace geosocial {

// Machine-readable error codes. The string form (see to_string) is what the
// HTTP layer puts in the "code" field, so renaming one is a wire change.
enum class ErrorCode {
    // validation
    malformed,
    too_short,
    missing_field,
    invalid_dob,
    invalid_argument,
    bad_request,
    empty_query,
    empty,
    empty_body,
    self_friend,
    bad_range,
    out_of_bounds,
    // auth
    duplicate_email,
    bad_credentials,
    invalid_token,
    expired,
    unauthorized,
    // social graph
    unknown_user,
    already_exists,
    not_pending,
    not_addressee,
    not_friends,
    not_participant,
    // location
    no_fix_yet,
    not_permitted,
    empty_dataset,
    // estimation
    negative_time,
    bad_phase,
    insufficient_rps,
    collinear_rps,
    parallel_bearings,
    insufficient_observations,
    polar_region,
    // storage and infrastructure
    connectivity,
    not_found,
    constraint,
    io,
    version_downgrade,
    config,
    bind,
    internal,
};

std::string_view to_string(ErrorCode code) noexcept;

struct Error {
    ErrorCode code = ErrorCode::internal;
    std::string message;
    // Extra context: the missing field name, the violated constraint, ...
    std::string detail;

    Error() = default;
    Error(ErrorCode c, std::string msg = {}, std::string det = {})
        : code(c), message(std::move(msg)), detail(std::move(det)) {}

    friend bool operator==(const Error& a, const Error& b) = default;
};

// A value or an Error. Small stand-in for std::expected, which the
// toolchain's C++20 library does not ship.
template <typename T>
class [[nodiscard]] Result {
public:
    Result(const T& value) : state_(value) {}
    Result(T&& value) : state_(std::move(value)) {}
    Result(Error error) : state_(std::move(error)) {}

    bool ok() const noexcept { return std::holds_alternative<T>(state_); }
    explicit operator bool() const noexcept { return ok(); }

    T& value() & {
        assert(ok());
        return std::get<T>(state_);
    }
    const T& value() const& {
        assert(ok());
        return std::get<T>(state_);
    }
    T&& value() && {
        assert(ok());
        return std::get<T>(std::move(state_));
    }
    const Error& error() const {
        assert(!ok());
        return std::get<Error>(state_);
    }
    ErrorCode code() const { return error().code; }

    T* operator->() { return &value(); }
    const T* operator->() const { return &value(); }
    T& operator*() & { return value(); }
    const T& operator*() const& { return value(); }

private:
    std::variant<T, Error> state_;
};

template <>
class [[nodiscard]] Result<void> {
public:
    Result() = default;
    Result(Error error) : error_(std::move(error)), ok_(false) {}

    bool ok() const noexcept { return ok_; }
    explicit operator bool() const noexcept { return ok_; }
    const Error& error() const {
        assert(!ok_);
        return error_;
    }
    ErrorCode code() const { return error().code; }

private:
    Error error_;
    bool ok_ = true;
};

using Status = Result<void>;

}  // namespace geosocial
