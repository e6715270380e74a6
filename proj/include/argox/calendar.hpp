#pragma once

#include <array>
#include <chrono>
#include <string>

namespace argox {

/// Calendar dates are plain day counts (std::chrono::sys_days).
using Date = std::chrono::sys_days;

Date parse_date(const std::string& iso);       // "YYYY-MM-DD"
std::string to_string(Date d);

Date make_date(int year, unsigned month, unsigned day);

/// Saturday-ending reporting week. Consecutive indices are 7 days apart.
struct EpiWeek {
    Date week_end;  // always a Saturday
    int index;      // monotone global numbering (week index of week_end)

    Date week_start() const { return week_end - std::chrono::days(6); }
    bool operator==(const EpiWeek&) const = default;
};

/// Week whose Saturday-ending window [end-6, end] contains the date.
EpiWeek week_of(Date d);

/// EpiWeek with the given global index.
EpiWeek week_at(int index);

bool is_saturday(Date d);

/// One-hot over Mon..Sat (positions 0..5); all zero on Sunday.
std::array<double, 6> weekday_indicators(Date d);

}  // namespace argox
