#pragma once

#include <chrono>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>

namespace geosocial {

using Timestamp = std::chrono::sys_time<std::chrono::microseconds>;

class Clock {
public:
    virtual ~Clock() = default;
    virtual Timestamp now() const = 0;
};

class SystemClock final : public Clock {
public:
    Timestamp now() const override;
};

// Test clock; time only moves when told to.
class ManualClock final : public Clock {
public:
    explicit ManualClock(Timestamp start);

    Timestamp now() const override;
    void set(Timestamp t);
    void advance(std::chrono::microseconds by);

private:
    mutable std::mutex mutex_;
    Timestamp now_;
};

// RFC 3339 UTC with microsecond precision, e.g. 2024-05-01T12:00:00.000000Z.
std::string format_rfc3339(Timestamp t);
std::optional<Timestamp> parse_rfc3339(std::string_view text);

std::int64_t to_micros(Timestamp t) noexcept;
Timestamp from_micros(std::int64_t us) noexcept;

// Calendar dates as YYYY-MM-DD.
std::string format_date(std::chrono::year_month_day date);
std::optional<std::chrono::year_month_day> parse_date(std::string_view text);

}  // namespace geosocial
