#include "argox/ensemble_eval.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>

#include "argox/csv.hpp"
#include "argox/errors.hpp"
#include "argox/stats.hpp"

namespace argox {

const char* to_string(MethodId m) {
    switch (m) {
        case MethodId::Argo: return "ARGO";
        case MethodId::Argox2Step: return "ARGOX_2STEP";
        case MethodId::ArgoxNatConstraint: return "ARGOX_NATCONSTRAINT";
        case MethodId::Naive: return "NAIVE";
        case MethodId::Ensemble: return "ENSEMBLE";
    }
    return "?";
}

MethodId method_from_string(const std::string& s) {
    for (MethodId m : {MethodId::Argo, MethodId::Argox2Step, MethodId::ArgoxNatConstraint,
                       MethodId::Naive, MethodId::Ensemble})
        if (s == to_string(m)) return m;
    fail(ErrorKind::ParseError, "unknown method '" + s + "'");
}

namespace {

double trailing_mse(const std::vector<double>& errors, int window) {
    auto n = static_cast<long>(errors.size());
    long take = std::min<long>(window, n);
    double s = 0.0;
    for (long i = n - take; i < n; ++i) s += errors[static_cast<size_t>(i)] * errors[static_cast<size_t>(i)];
    return s / static_cast<double>(take);
}

}  // namespace

WinnerResult select_winner(const std::vector<double>& argo_errors,
                           const std::vector<double>& two_step_errors,
                           const std::vector<double>& nat_constraint_errors, int window) {
    const std::vector<double>* histories[3] = {&argo_errors, &two_step_errors,
                                               &nat_constraint_errors};
    for (const auto* h : histories)
        if (static_cast<int>(h->size()) < window) return {MethodId::Argo, true};

    MethodId best = kConstituents[0];
    double best_mse = trailing_mse(*histories[0], window);
    for (int i = 1; i < 3; ++i) {
        double mse = trailing_mse(*histories[i], window);
        if (mse < best_mse) {  // strict: ties keep the higher-priority method
            best_mse = mse;
            best = kConstituents[i];
        }
    }
    return {best, false};
}

std::optional<std::pair<double, double>> build_interval(double point,
                                                        const std::vector<double>& residuals,
                                                        int window, int min_residuals) {
    if (static_cast<int>(residuals.size()) < min_residuals) return std::nullopt;
    auto n = static_cast<long>(residuals.size());
    long take = std::min<long>(window, n);
    std::span<const double> tail(residuals.data() + (n - take), static_cast<size_t>(take));
    double half_width = 1.96 * sample_std(tail);
    return std::make_pair(point - half_width, point + half_width);
}

ScoreTable score(const std::vector<ForecastRecord>& forecasts, const TruthFn& truth,
                 Date window_start, Date window_end) {
    struct Group {
        std::vector<double> pred, actual;
        int dropped = 0;
        int covered = 0, n_intervals = 0;
    };
    std::map<std::tuple<std::string, std::string, int>, Group> groups;
    std::map<std::string, GeoId> geo_of;

    for (const auto& rec : forecasts) {
        Date target = rec.target_week_end();
        if (target < window_start || target > window_end) continue;
        auto key = std::make_tuple(rec.geo.code, std::string(to_string(rec.method)), rec.horizon);
        auto& g = groups[key];
        geo_of.emplace(rec.geo.code, rec.geo);
        auto y = truth(rec.geo, target);
        if (!y) {
            ++g.dropped;
            continue;
        }
        g.pred.push_back(rec.point);
        g.actual.push_back(*y);
        if (rec.lo95 && rec.hi95) {
            ++g.n_intervals;
            if (*y >= *rec.lo95 && *y <= *rec.hi95) ++g.covered;
        }
    }

    ScoreTable table;
    for (auto& [key, g] : groups) {
        if (g.pred.empty()) continue;
        ScoreRow row;
        row.geo = geo_of.at(std::get<0>(key));
        row.method = method_from_string(std::get<1>(key));
        row.horizon = std::get<2>(key);
        double se = 0.0, ae = 0.0;
        for (size_t i = 0; i < g.pred.size(); ++i) {
            double e = g.pred[i] - g.actual[i];
            se += e * e;
            ae += std::abs(e);
        }
        auto n = static_cast<double>(g.pred.size());
        row.rmse = std::sqrt(se / n);
        row.mae = ae / n;
        if (pearson_defined(g.pred, g.actual)) row.pearson_r = pearson(g.pred, g.actual);
        row.n_weeks = static_cast<int>(g.pred.size());
        row.dropped = g.dropped;
        row.n_intervals = g.n_intervals;
        if (g.n_intervals > 0)
            row.coverage = static_cast<double>(g.covered) / g.n_intervals;
        table.rows.push_back(std::move(row));
    }
    if (table.rows.empty()) fail(ErrorKind::EmptyEvaluation, "no forecast aligns with the truth feed");
    return table;
}

namespace {

std::string opt_str(const std::optional<double>& v) {
    return v ? format_double(*v) : std::string();
}

std::ofstream open_out(const std::filesystem::path& p) {
    std::ofstream out(p);
    if (!out) fail(ErrorKind::IoError, "cannot write " + p.string());
    return out;
}

}  // namespace

void write_forecasts_csv(const std::vector<ForecastRecord>& forecasts, const std::string& path) {
    auto out = open_out(path);
    out << "forecast_date,target_week_end,horizon_weeks,geo,method,point,lo95,hi95,"
           "selected_method\n";
    for (const auto& r : forecasts)
        out << to_string(r.forecast_date) << ',' << to_string(r.target_week_end()) << ','
            << r.horizon << ',' << r.geo.code << ',' << to_string(r.method) << ','
            << format_double(r.point) << ',' << opt_str(r.lo95) << ',' << opt_str(r.hi95) << ','
            << (r.selected_method ? to_string(*r.selected_method) : "") << '\n';
}

std::vector<ForecastRecord> read_forecasts_csv(const std::string& path) {
    CsvTable csv = read_csv(path);
    size_t fd = csv.col("forecast_date"), hz = csv.col("horizon_weeks"), geo = csv.col("geo"),
           me = csv.col("method"), pt = csv.col("point"), lo = csv.col("lo95"),
           hi = csv.col("hi95"), sel = csv.col("selected_method");
    std::vector<ForecastRecord> out;
    for (const auto& row : csv.rows) {
        ForecastRecord r;
        r.forecast_date = parse_date(row[fd]);
        r.horizon = std::stoi(row[hz]);
        const std::string& code = row[geo];
        r.geo = code == "US"               ? GeoId::nation()
                : code.size() == 3 && code[0] == 'R' ? GeoId::region(code)
                                                     : GeoId::state(code);
        r.method = method_from_string(row[me]);
        r.point = std::stod(row[pt]);
        if (!row[lo].empty()) r.lo95 = std::stod(row[lo]);
        if (!row[hi].empty()) r.hi95 = std::stod(row[hi]);
        if (!row[sel].empty()) r.selected_method = method_from_string(row[sel]);
        out.push_back(std::move(r));
    }
    return out;
}

void emit_reports(const ScoreTable& scores, const std::vector<ForecastRecord>& forecasts,
                  const std::string& out_dir) {
    if (forecasts.empty()) fail(ErrorKind::EmptyEvaluation, "no forecasts to report");
    std::filesystem::path dir(out_dir);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);

    std::vector<ForecastRecord> sorted = forecasts;
    std::sort(sorted.begin(), sorted.end(), [](const ForecastRecord& a, const ForecastRecord& b) {
        return std::tie(a.forecast_date, a.geo.code, a.horizon) <
                   std::tie(b.forecast_date, b.geo.code, b.horizon) ||
               (std::tie(a.forecast_date, a.geo.code, a.horizon) ==
                    std::tie(b.forecast_date, b.geo.code, b.horizon) &&
                std::string(to_string(a.method)) < to_string(b.method));
    });
    write_forecasts_csv(sorted, (dir / "forecasts.csv").string());

    {
        auto out = open_out(dir / "scores_by_state.csv");
        out << "geo,method,horizon_weeks,rmse,mae,pearson_r,n_weeks,dropped\n";
        for (const auto& r : scores.rows)
            out << r.geo.code << ',' << to_string(r.method) << ',' << r.horizon << ','
                << format_double(r.rmse) << ',' << format_double(r.mae) << ','
                << opt_str(r.pearson_r) << ',' << r.n_weeks << ',' << r.dropped << '\n';
    }

    {
        // State-mean per method/horizon (regional and national rows excluded).
        auto out = open_out(dir / "scores_summary.csv");
        out << "method,horizon_weeks,rmse,mae,pearson_r,n_states\n";
        std::map<std::pair<std::string, int>, std::array<double, 3>> sums;
        std::map<std::pair<std::string, int>, std::array<int, 2>> counts;  // states, with r
        for (const auto& r : scores.rows) {
            if (r.geo.level != GeoLevel::State) continue;
            auto key = std::make_pair(std::string(to_string(r.method)), r.horizon);
            sums[key][0] += r.rmse;
            sums[key][1] += r.mae;
            counts[key][0] += 1;
            if (r.pearson_r) {
                sums[key][2] += *r.pearson_r;
                counts[key][1] += 1;
            }
        }
        for (const auto& [key, s] : sums) {
            const auto& c = counts.at(key);
            out << key.first << ',' << key.second << ',' << format_double(s[0] / c[0]) << ','
                << format_double(s[1] / c[0]) << ','
                << (c[1] > 0 ? format_double(s[2] / c[1]) : std::string()) << ',' << c[0] << '\n';
        }
    }

    {
        auto out = open_out(dir / "ensemble_selection.csv");
        out << "method,horizon_weeks,share,count\n";
        std::map<int, int> totals;
        std::map<std::pair<int, std::string>, int> tally;
        for (const auto& r : sorted) {
            if (r.method != MethodId::Ensemble || !r.selected_method) continue;
            ++totals[r.horizon];
            ++tally[{r.horizon, to_string(*r.selected_method)}];
        }
        for (MethodId m : kConstituents)
            for (const auto& [horizon, total] : totals) {
                auto it = tally.find({horizon, to_string(m)});
                int count = it == tally.end() ? 0 : it->second;
                out << to_string(m) << ',' << horizon << ','
                    << format_double(static_cast<double>(count) / total) << ',' << count << '\n';
            }
    }

    {
        auto out = open_out(dir / "coverage.csv");
        out << "geo,method,horizon_weeks,coverage,n_intervals\n";
        for (const auto& r : scores.rows) {
            if (!r.coverage) continue;
            out << r.geo.code << ',' << to_string(r.method) << ',' << r.horizon << ','
                << format_double(*r.coverage) << ',' << r.n_intervals << '\n';
        }
    }
}

}  // namespace argox
