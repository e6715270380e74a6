#include "argox/series.hpp"

#include "argox/errors.hpp"

namespace argox {

double DailySeries::at(Date d) const {
    if (!covers(d))
        fail(ErrorKind::InsufficientHistory,
             geo.code + "/" + variable + " has no value on " + argox::to_string(d));
    return values[static_cast<size_t>((d - start).count())];
}

double& DailySeries::at(Date d) {
    if (!covers(d))
        fail(ErrorKind::InsufficientHistory,
             geo.code + "/" + variable + " has no value on " + argox::to_string(d));
    return values[static_cast<size_t>((d - start).count())];
}

std::vector<double> DailySeries::slice(Date from, Date to) const {
    if (from > to) return {};
    if (!covers(from) || !covers(to))
        fail(ErrorKind::InsufficientHistory,
             geo.code + "/" + variable + " does not cover [" + argox::to_string(from) + ", " +
                 argox::to_string(to) + "]");
    auto lo = static_cast<size_t>((from - start).count());
    auto hi = static_cast<size_t>((to - start).count());
    return std::vector<double>(values.begin() + lo, values.begin() + hi + 1);
}

double DailySeries::weekly_sum(const EpiWeek& week) const {
    if (!covers(week.week_start()) || !covers(week.week_end))
        fail(ErrorKind::IncompleteWeek,
             geo.code + "/" + variable + " misses days of week ending " +
                 argox::to_string(week.week_end));
    double sum = 0.0;
    for (Date d = week.week_start(); d <= week.week_end; d += std::chrono::days(1)) sum += at(d);
    return sum;
}

double WeeklySeries::at(int week_index) const {
    if (!covers(week_index))
        fail(ErrorKind::InsufficientHistory,
             geo.code + " weekly series has no week " + std::to_string(week_index));
    return values[static_cast<size_t>(week_index - first_week_index)];
}

WeeklySeries aggregate_weekly(const DailySeries& daily) {
    WeeklySeries out;
    out.geo = daily.geo;
    if (daily.values.empty()) return out;

    EpiWeek first = week_of(daily.start);
    if (first.week_start() < daily.start) first = week_at(first.index + 1);
    out.first_week_index = first.index;
    for (EpiWeek w = first; w.week_end <= daily.end(); w = week_at(w.index + 1))
        out.values.push_back(daily.weekly_sum(w));
    return out;
}

}  // namespace argox
