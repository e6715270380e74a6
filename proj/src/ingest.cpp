#include "argox/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <set>

#include "argox/csv.hpp"
#include "argox/errors.hpp"

namespace argox {

namespace {

double parse_value(const std::string& field, const std::string& context, int lineno) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec != std::errc() || ptr != field.data() + field.size())
        fail(ErrorKind::ParseError,
             context + " line " + std::to_string(lineno) + ": bad numeric '" + field + "'");
    return v;
}

struct RawGeoRows {
    std::vector<Date> dates;
    std::vector<double> cases;
    std::vector<double> deaths;
};

DailySeries difference(const GeoId& geo, const std::string& variable,
                       const std::vector<Date>& dates, const std::vector<double>& cumulative) {
    for (size_t i = 1; i < dates.size(); ++i) {
        auto gap = (dates[i] - dates[i - 1]).count();
        if (gap <= 0)
            fail(ErrorKind::OrderError,
                 geo.code + ": dates not strictly increasing at " + to_string(dates[i]));
        if (gap > 1)
            fail(ErrorKind::GapError,
                 geo.code + ": missing date " + to_string(dates[i - 1] + std::chrono::days(1)));
    }
    DailySeries out{geo, variable, dates.front(), {}};
    out.values.reserve(cumulative.size());
    out.values.push_back(cumulative.front());
    for (size_t i = 1; i < cumulative.size(); ++i)
        out.values.push_back(cumulative[i] - cumulative[i - 1]);
    return out;
}

// Datewise sum over the intersection of member coverage.
DailySeries sum_members(const GeoId& geo, const std::string& variable,
                        const std::vector<const DailySeries*>& members) {
    Date from = members.front()->start;
    Date to = members.front()->end();
    for (const auto* m : members) {
        from = std::max(from, m->start);
        to = std::min(to, m->end());
    }
    DailySeries out{geo, variable, from, {}};
    auto n = (to - from).count() + 1;
    if (n <= 0)
        fail(ErrorKind::GapError, geo.code + "/" + variable + ": member ranges do not overlap");
    out.values.assign(static_cast<size_t>(n), 0.0);
    for (const auto* m : members) {
        auto offset = (from - m->start).count();
        for (long i = 0; i < n; ++i)
            out.values[static_cast<size_t>(i)] += m->values[static_cast<size_t>(offset + i)];
    }
    return out;
}

}  // namespace

SurveillancePanel load_surveillance(const std::string& path, SurveillanceSchema schema,
                                    SourceTag tag, const RegionTable& regions) {
    CsvTable csv = read_csv(path);
    size_t date_col = csv.col("date");
    size_t cases_col = csv.col("cases");
    size_t deaths_col = csv.col("deaths");
    size_t state_col = schema == SurveillanceSchema::State ? csv.col("state") : 0;

    std::map<std::string, RawGeoRows> raw;
    int lineno = 1;
    for (const auto& row : csv.rows) {
        ++lineno;
        if (row.size() != csv.header.size())
            fail(ErrorKind::ParseError, path + " line " + std::to_string(lineno) +
                                            ": expected " + std::to_string(csv.header.size()) +
                                            " fields, got " + std::to_string(row.size()));
        std::string code = schema == SurveillanceSchema::State ? row[state_col] : "US";
        if (schema == SurveillanceSchema::State && !regions.is_state(code))
            fail(ErrorKind::NotAState,
                 path + " line " + std::to_string(lineno) + ": unknown state '" + code + "'");
        auto& rows = raw[code];
        rows.dates.push_back(parse_date(row[date_col]));
        rows.cases.push_back(parse_value(row[cases_col], path, lineno));
        rows.deaths.push_back(parse_value(row[deaths_col], path, lineno));
    }
    if (raw.empty()) fail(ErrorKind::EmptyPanel, path + ": no data rows");

    SurveillancePanel panel;
    panel.source_ = tag;
    for (auto& [code, rows] : raw) {
        GeoId geo = schema == SurveillanceSchema::State ? GeoId::state(code) : GeoId::nation();
        panel.deaths_.emplace(code, difference(geo, "deaths", rows.dates, rows.deaths));
        panel.cases_.emplace(code, difference(geo, "cases", rows.dates, rows.cases));
    }

    if (schema == SurveillanceSchema::State) {
        // Derive regional and national series from the state increments.
        std::vector<const DailySeries*> all_deaths, all_cases;
        for (const auto& region : regions.region_codes()) {
            std::vector<const DailySeries*> member_deaths, member_cases;
            for (const auto& state : regions.members_of(region)) {
                auto it = panel.deaths_.find(state);
                if (it == panel.deaths_.end()) continue;
                member_deaths.push_back(&it->second);
                member_cases.push_back(&panel.cases_.at(state));
            }
            if (member_deaths.empty()) continue;
            panel.deaths_.emplace(region, sum_members(GeoId::region(region), "deaths",
                                                      member_deaths));
            panel.cases_.emplace(region, sum_members(GeoId::region(region), "cases",
                                                     member_cases));
            all_deaths.insert(all_deaths.end(), member_deaths.begin(), member_deaths.end());
            all_cases.insert(all_cases.end(), member_cases.begin(), member_cases.end());
        }
        if (!all_deaths.empty()) {
            panel.deaths_.emplace("US", sum_members(GeoId::nation(), "deaths", all_deaths));
            panel.cases_.emplace("US", sum_members(GeoId::nation(), "cases", all_cases));
        }
    }
    return panel;
}

bool SurveillancePanel::has(const GeoId& geo) const { return deaths_.count(geo.code) > 0; }

const DailySeries& SurveillancePanel::deaths(const GeoId& geo) const {
    auto it = deaths_.find(geo.code);
    if (it == deaths_.end())
        fail(ErrorKind::InsufficientHistory, "no deaths series for " + geo.code);
    return it->second;
}

const DailySeries& SurveillancePanel::cases(const GeoId& geo) const {
    auto it = cases_.find(geo.code);
    if (it == cases_.end()) fail(ErrorKind::InsufficientHistory, "no cases series for " + geo.code);
    return it->second;
}

std::vector<std::string> SurveillancePanel::state_codes() const {
    std::vector<std::string> out;
    for (const auto& [code, series] : deaths_)
        if (series.geo.level == GeoLevel::State) out.push_back(code);
    return out;
}

std::array<double, 4> persistence_forecast(const SurveillancePanel& panel, const GeoId& geo,
                                           const EpiWeek& week) {
    double v = panel.deaths(geo).weekly_sum(week);
    return {v, v, v, v};
}

QueryPanel load_query_panel(const std::string& path, const RegionTable& regions) {
    CsvTable csv = read_csv(path);
    size_t date_col = csv.col("date");
    size_t geo_col = csv.col("geo");
    size_t query_col = csv.col("query");
    size_t value_col = csv.col("value");

    struct Cell {
        Date date;
        std::string geo;
        std::string query;
        double value;
    };
    std::vector<Cell> cells;
    cells.reserve(csv.rows.size());
    std::set<std::string> query_set;
    Date min_date = Date::max(), max_date = Date::min();

    int lineno = 1;
    for (const auto& row : csv.rows) {
        ++lineno;
        if (row.size() != csv.header.size())
            fail(ErrorKind::ParseError, path + " line " + std::to_string(lineno) +
                                            ": expected 4 fields, got " +
                                            std::to_string(row.size()));
        if (!regions.is_state(row[geo_col]))
            fail(ErrorKind::NotAState,
                 path + " line " + std::to_string(lineno) + ": '" + row[geo_col] + "'");
        double v = parse_value(row[value_col], path, lineno);
        if (v < 0.0)
            fail(ErrorKind::ValueError, path + " line " + std::to_string(lineno) +
                                            ": negative query frequency " + row[value_col]);
        Date d = parse_date(row[date_col]);
        min_date = std::min(min_date, d);
        max_date = std::max(max_date, d);
        query_set.insert(row[query_col]);
        cells.push_back({d, row[geo_col], row[query_col], v});
    }
    if (cells.empty()) fail(ErrorKind::EmptyPanel, path + ": no data rows");

    QueryPanel panel;
    panel.regions_ = regions;
    panel.queries_.assign(query_set.begin(), query_set.end());
    panel.start_ = min_date;
    panel.n_days_ = static_cast<int>((max_date - min_date).count()) + 1;

    auto n = static_cast<size_t>(panel.n_days_);
    for (const auto& state : regions.state_codes())
        for (const auto& q : panel.queries_)
            panel.series_.emplace(std::make_pair(state, q),
                                  DailySeries{GeoId::state(state), "query:" + q, min_date,
                                              std::vector<double>(n, 0.0)});
    for (const auto& cell : cells)
        panel.series_.at({cell.geo, cell.query})
            .values[static_cast<size_t>((cell.date - min_date).count())] = cell.value;

    // Regional and national series by summation.
    for (const auto& q : panel.queries_) {
        DailySeries nation{GeoId::nation(), "query:" + q, min_date, std::vector<double>(n, 0.0)};
        for (const auto& region : regions.region_codes()) {
            DailySeries sum{GeoId::region(region), "query:" + q, min_date,
                            std::vector<double>(n, 0.0)};
            for (const auto& state : regions.members_of(region)) {
                const auto& sv = panel.series_.at({state, q}).values;
                for (size_t i = 0; i < n; ++i) sum.values[i] += sv[i];
            }
            for (size_t i = 0; i < n; ++i) nation.values[i] += sum.values[i];
            panel.series_.emplace(std::make_pair(region, q), std::move(sum));
        }
        panel.series_.emplace(std::make_pair(std::string("US"), q), std::move(nation));
    }
    return panel;
}

bool QueryPanel::has_series(const GeoId& geo, const std::string& query) const {
    return series_.count({geo.code, query}) > 0;
}

const DailySeries& QueryPanel::series(const GeoId& geo, const std::string& query) const {
    auto it = series_.find({geo.code, query});
    if (it == series_.end())
        fail(ErrorKind::InsufficientHistory, "no query series " + geo.code + "/" + query);
    return it->second;
}

DailySeries& QueryPanel::series_mut(const GeoId& geo, const std::string& query) {
    auto it = series_.find({geo.code, query});
    if (it == series_.end())
        fail(ErrorKind::InsufficientHistory, "no query series " + geo.code + "/" + query);
    return it->second;
}

std::vector<double> QueryPanel::values(const GeoId& geo, const std::string& query, Date from,
                                       Date to) const {
    if (from < start_ || to > end())
        fail(ErrorKind::InsufficientHistory,
             "query grid does not cover [" + argox::to_string(from) + ", " + argox::to_string(to) +
                 "]");
    auto it = series_.find({geo.code, query});
    if (it == series_.end())
        return std::vector<double>(static_cast<size_t>((to - from).count()) + 1, 0.0);
    return it->second.slice(from, to);
}

void QueryPanel::drop_queries(const std::vector<std::string>& to_drop) {
    std::set<std::string> drop(to_drop.begin(), to_drop.end());
    std::vector<std::string> kept;
    for (const auto& q : queries_)
        if (!drop.count(q)) kept.push_back(q);
    if (kept.empty()) fail(ErrorKind::EmptyPanel, "dropping every query");
    for (auto it = series_.begin(); it != series_.end();)
        it = drop.count(it->first.second) ? series_.erase(it) : std::next(it);
    queries_ = std::move(kept);
}

}  // namespace argox
