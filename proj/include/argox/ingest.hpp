#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

#include "argox/geo.hpp"
#include "argox/series.hpp"

namespace argox {

enum class SourceTag { InputFeed, TruthFeed };
enum class SurveillanceSchema { Nation, State };

/// Incremental deaths and cases per geo. State series come from the file;
/// region and nation series are derived by datewise summation when the file
/// does not provide them. A provided nation series is never reconciled
/// against the state sum (feeds disagree in practice).
class SurveillancePanel {
public:
    SourceTag source() const { return source_; }

    bool has(const GeoId& geo) const;
    const DailySeries& deaths(const GeoId& geo) const;
    const DailySeries& cases(const GeoId& geo) const;

    std::vector<std::string> state_codes() const;  // states present, sorted

    friend SurveillancePanel load_surveillance(const std::string& path, SurveillanceSchema schema,
                                               SourceTag tag, const RegionTable& regions);

private:
    SourceTag source_ = SourceTag::InputFeed;
    std::map<std::string, DailySeries> deaths_;  // keyed by geo code
    std::map<std::string, DailySeries> cases_;
};

/// Parse a cumulative-count CSV and convert to daily increments.
/// State schema: `date,state,cases,deaths` (a `fips` column is ignored);
/// nation schema: `date,cases,deaths`. The first date's increment is its
/// cumulative value; interior date gaps are errors, not imputed.
SurveillancePanel load_surveillance(const std::string& path, SurveillanceSchema schema,
                                    SourceTag tag, const RegionTable& regions);

/// Current week's incremental deaths repeated as the 1..4-week forecast.
std::array<double, 4> persistence_forecast(const SurveillancePanel& panel, const GeoId& geo,
                                           const EpiWeek& week);

/// Search-frequency panel on a dense (date x state x query) grid, absent
/// cells zero (the Trends convention for below-threshold volume). Region
/// and nation series are the datewise sums of member states.
class QueryPanel {
public:
    const std::vector<std::string>& queries() const { return queries_; }
    Date start() const { return start_; }
    Date end() const { return start_ + std::chrono::days(n_days_ - 1); }
    int n_days() const { return n_days_; }

    bool has_series(const GeoId& geo, const std::string& query) const;
    const DailySeries& series(const GeoId& geo, const std::string& query) const;
    DailySeries& series_mut(const GeoId& geo, const std::string& query);

    /// Values over [from, to]; zero-filled when the (geo, query) cell is
    /// absent. Throws InsufficientHistory when the dates leave the grid.
    std::vector<double> values(const GeoId& geo, const std::string& query, Date from,
                               Date to) const;

    void drop_queries(const std::vector<std::string>& to_drop);

    const RegionTable& regions() const { return regions_; }

    friend QueryPanel load_query_panel(const std::string& path, const RegionTable& regions);

private:
    std::vector<std::string> queries_;  // sorted unique
    Date start_{};
    int n_days_ = 0;
    RegionTable regions_;
    std::map<std::pair<std::string, std::string>, DailySeries> series_;  // (geo code, query)
};

/// Long-format CSV `date,geo,query,value` with state-level geos.
QueryPanel load_query_panel(const std::string& path, const RegionTable& regions);

}  // namespace argox
