#pragma once

#include <string>
#include <vector>

#include "argox/calendar.hpp"
#include "argox/geo.hpp"

namespace argox {

/// Gap-free daily series: one value per calendar day starting at `start`.
struct DailySeries {
    GeoId geo;
    std::string variable;  // "deaths", "cases", or "query:<name>"
    Date start{};
    std::vector<double> values;

    Date end() const { return start + std::chrono::days(static_cast<long>(values.size()) - 1); }
    bool covers(Date d) const { return !values.empty() && d >= start && d <= end(); }

    double at(Date d) const;                       // throws InsufficientHistory out of range
    double& at(Date d);
    std::vector<double> slice(Date from, Date to) const;  // inclusive

    /// Sum of the 7 daily values of the Saturday-ending week.
    /// Throws IncompleteWeek if any day is uncovered.
    double weekly_sum(const EpiWeek& week) const;
};

/// Week-indexed values (global EpiWeek indices, consecutive).
struct WeeklySeries {
    GeoId geo;
    int first_week_index = 0;
    std::vector<double> values;

    bool covers(int week_index) const {
        return week_index >= first_week_index &&
               week_index < first_week_index + static_cast<int>(values.size());
    }
    double at(int week_index) const;
};

/// Saturday-ending weekly sums over the days fully covered by the series.
WeeklySeries aggregate_weekly(const DailySeries& daily);

}  // namespace argox
