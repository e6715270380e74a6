#include "argox/calendar.hpp"

#include <charconv>

#include "argox/errors.hpp"

namespace argox {

namespace {

// 1970-01-03 was a Saturday; Saturdays sit at day-count 2 mod 7.
constexpr long kSaturdayOffset = 2;

int parse_int(std::string_view s) {
    int v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size())
        fail(ErrorKind::ParseError, "bad date field '" + std::string(s) + "'");
    return v;
}

}  // namespace

Date parse_date(const std::string& iso) {
    if (iso.size() != 10 || iso[4] != '-' || iso[7] != '-')
        fail(ErrorKind::ParseError, "expected YYYY-MM-DD, got '" + iso + "'");
    std::string_view sv(iso);
    int y = parse_int(sv.substr(0, 4));
    int m = parse_int(sv.substr(5, 2));
    int d = parse_int(sv.substr(8, 2));
    return make_date(y, static_cast<unsigned>(m), static_cast<unsigned>(d));
}

Date make_date(int year, unsigned month, unsigned day) {
    std::chrono::year_month_day ymd{std::chrono::year(year), std::chrono::month(month),
                                    std::chrono::day(day)};
    if (!ymd.ok())
        fail(ErrorKind::ParseError, "invalid calendar date " + std::to_string(year) + "-" +
                                        std::to_string(month) + "-" + std::to_string(day));
    return std::chrono::sys_days(ymd);
}

std::string to_string(Date d) {
    std::chrono::year_month_day ymd(d);
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
    return buf;
}

bool is_saturday(Date d) {
    return std::chrono::weekday(d) == std::chrono::Saturday;
}

EpiWeek week_of(Date d) {
    auto wd = std::chrono::weekday(d).c_encoding();  // Sun=0 .. Sat=6
    Date end = d + std::chrono::days((6 - wd + 7) % 7);
    long count = end.time_since_epoch().count();
    return EpiWeek{end, static_cast<int>((count - kSaturdayOffset) / 7)};
}

EpiWeek week_at(int index) {
    Date end{std::chrono::days(static_cast<long>(index) * 7 + kSaturdayOffset)};
    return EpiWeek{end, index};
}

std::array<double, 6> weekday_indicators(Date d) {
    std::array<double, 6> out{};
    auto wd = std::chrono::weekday(d).c_encoding();  // Sun=0, Mon=1, .. Sat=6
    if (wd >= 1) out[wd - 1] = 1.0;
    return out;
}

}  // namespace argox
