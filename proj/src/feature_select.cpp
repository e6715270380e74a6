#include "argox/feature_select.hpp"

#include <algorithm>
#include <fstream>

#include "argox/csv.hpp"
#include "argox/errors.hpp"
#include "argox/solver.hpp"
#include "argox/stats.hpp"

namespace argox {

std::vector<std::string> LagTable::selected_queries() const {
    std::vector<std::string> out;
    for (const auto& e : entries)
        if (e.selected) out.push_back(e.query);
    return out;
}

const QueryLag* LagTable::find(const std::string& query) const {
    for (const auto& e : entries)
        if (e.query == query) return &e;
    return nullptr;
}

OptimalLagResult optimal_lag(const DailySeries& deaths, const DailySeries& query,
                             Date window_start, Date window_end, const LagRange& range) {
    if (range.min_lag > range.max_lag)
        fail(ErrorKind::ConfigError, "empty lag range");
    auto window_days = (window_end - window_start).count() + 1;
    if (window_days <= 2)
        fail(ErrorKind::InsufficientHistory, "lag window needs more than 2 days");
    if (!deaths.covers(window_start) || !deaths.covers(window_end))
        fail(ErrorKind::InsufficientHistory, "deaths series does not cover the lag window");
    Date earliest = window_start - std::chrono::days(range.max_lag);
    if (!query.covers(earliest) || !query.covers(window_end))
        fail(ErrorKind::InsufficientHistory,
             query.variable + " does not cover the shifted lag window");

    Eigen::VectorXd y(window_days);
    {
        auto yv = deaths.slice(window_start, window_end);
        for (long i = 0; i < window_days; ++i) y[i] = yv[static_cast<size_t>(i)];
    }
    double y_var = population_var(std::vector<double>(y.data(), y.data() + y.size()));

    // Ascending scan with strict improvement keeps the smallest lag on ties.
    OptimalLagResult best;
    bool first = true;
    for (int lag = range.min_lag; lag <= range.max_lag; ++lag) {
        auto xv = query.slice(window_start - std::chrono::days(lag),
                              window_end - std::chrono::days(lag));
        bool constant = std::all_of(xv.begin(), xv.end(), [&](double v) { return v == xv[0]; });
        double mse = y_var;  // intercept-only fallback for a flat regressor
        if (!constant) {
            DesignMatrix d;
            d.X.resize(window_days, 1);
            for (long i = 0; i < window_days; ++i) d.X(i, 0) = xv[static_cast<size_t>(i)];
            d.names = {"x"};
            d.finalize();
            FitResult fit = ols_fit(d, y);
            mse = (y.array() - fit.intercept - fit.beta[0] * d.X.col(0).array())
                      .square()
                      .mean();
        }
        if (first || mse < best.mse) {
            best = {lag, mse, constant};
            first = false;
        }
    }
    return best;
}

LagTable score_and_select(const DailySeries& national_deaths, const QueryPanel& panel,
                          Date window_start, Date window_end, double threshold,
                          const LagRange& range) {
    LagTable table;
    table.window_start = window_start;
    table.window_end = window_end;
    table.lag_range = range;
    table.threshold = threshold;

    auto y = national_deaths.slice(window_start, window_end);
    for (const auto& q : panel.queries()) {
        const DailySeries& series = panel.series(GeoId::nation(), q);
        OptimalLagResult lag = optimal_lag(national_deaths, series, window_start, window_end,
                                           range);
        auto x = series.slice(window_start - std::chrono::days(lag.lag),
                              window_end - std::chrono::days(lag.lag));
        double r = pearson(x, y);  // 0 on zero variance
        QueryLag entry;
        entry.query = q;
        entry.optimal_lag = lag.lag;
        entry.pearson_r = r;
        entry.selected = r > threshold;
        entry.degenerate = lag.degenerate;
        entry.mse = lag.mse;
        table.entries.push_back(std::move(entry));
    }
    std::sort(table.entries.begin(), table.entries.end(), [](const QueryLag& a, const QueryLag& b) {
        if (a.pearson_r != b.pearson_r) return a.pearson_r > b.pearson_r;
        return a.query < b.query;
    });
    return table;
}

void write_lag_table_csv(const LagTable& table, const std::string& path) {
    std::ofstream out(path);
    if (!out) fail(ErrorKind::IoError, "cannot write " + path);
    out << "query,optimal_lag,pearson_r,selected\n";
    for (const auto& e : table.entries)
        out << e.query << ',' << e.optimal_lag << ',' << format_double(e.pearson_r) << ','
            << (e.selected ? 1 : 0) << '\n';
}

LagTable read_lag_table_csv(const std::string& path) {
    CsvTable csv = read_csv(path);
    size_t qc = csv.col("query"), lc = csv.col("optimal_lag"), rc = csv.col("pearson_r"),
           sc = csv.col("selected");
    LagTable table;
    for (const auto& row : csv.rows) {
        QueryLag e;
        e.query = row[qc];
        e.optimal_lag = std::stoi(row[lc]);
        e.pearson_r = std::stod(row[rc]);
        e.selected = row[sc] == "1";
        table.entries.push_back(std::move(e));
    }
    return table;
}

}  // namespace argox
