#include "geosocial/common/clock.hpp"

#include <charconv>
#include <cstdio>

namespace geosocial {

using namespace std::chrono;

Timestamp SystemClock::now() const {
    return time_point_cast<microseconds>(system_clock::now());
}

ManualClock::ManualClock(Timestamp start) : now_(start) {}

Timestamp ManualClock::now() const {
    std::lock_guard lock(mutex_);
    return now_;
}

void ManualClock::set(Timestamp t) {
    std::lock_guard lock(mutex_);
    now_ = t;
}

void ManualClock::advance(microseconds by) {
    std::lock_guard lock(mutex_);
    now_ += by;
}

std::int64_t to_micros(Timestamp t) noexcept { return t.time_since_epoch().count(); }

Timestamp from_micros(std::int64_t us) noexcept { return Timestamp{microseconds{us}}; }

std::string format_rfc3339(Timestamp t) {
    const auto day = floor<days>(t);
    const year_month_day ymd{day};
    const hh_mm_ss tod{t - day};
    char buf[40];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02lld:%02lld:%02lld.%06lldZ",
                  static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                  static_cast<unsigned>(ymd.day()),
                  static_cast<long long>(tod.hours().count()),
                  static_cast<long long>(tod.minutes().count()),
                  static_cast<long long>(tod.seconds().count()),
                  static_cast<long long>(tod.subseconds().count()));
    return buf;
}

namespace {

bool parse_int(std::string_view text, int& out) {
    if (text.empty()) return false;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
    return ec == std::errc{} && ptr == text.data() + text.size();
}

}  // namespace

std::optional<year_month_day> parse_date(std::string_view text) {
    if (text.size() != 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
    int y = 0, m = 0, d = 0;
    if (!parse_int(text.substr(0, 4), y) || !parse_int(text.substr(5, 2), m) ||
        !parse_int(text.substr(8, 2), d))
        return std::nullopt;
    const year_month_day ymd{year{y}, month{static_cast<unsigned>(m)}, day{static_cast<unsigned>(d)}};
    if (!ymd.ok()) return std::nullopt;
    return ymd;
}

std::string format_date(year_month_day date) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(date.year()),
                  static_cast<unsigned>(date.month()), static_cast<unsigned>(date.day()));
    return buf;
}

std::optional<Timestamp> parse_rfc3339(std::string_view text) {
    // YYYY-MM-DDTHH:MM:SS[.ffffff]Z
    if (text.size() < 20 || text.back() != 'Z' || text[10] != 'T') return std::nullopt;
    auto date = parse_date(text.substr(0, 10));
    if (!date) return std::nullopt;
    int hh = 0, mm = 0, ss = 0;
    if (text[13] != ':' || text[16] != ':' || !parse_int(text.substr(11, 2), hh) ||
        !parse_int(text.substr(14, 2), mm) || !parse_int(text.substr(17, 2), ss))
        return std::nullopt;
    if (hh > 23 || mm > 59 || ss > 60) return std::nullopt;
    long long frac_us = 0;
    const auto rest = text.substr(19, text.size() - 20);
    if (!rest.empty()) {
        if (rest[0] != '.' || rest.size() < 2 || rest.size() > 7) return std::nullopt;
        int frac = 0;
        if (!parse_int(rest.substr(1), frac)) return std::nullopt;
        frac_us = frac;
        for (std::size_t i = rest.size() - 1; i < 6; ++i) frac_us *= 10;
    }
    return Timestamp{sys_days{*date}} + hours{hh} + minutes{mm} + seconds{ss} +
           microseconds{frac_us};
}

}  // namespace geosocial
