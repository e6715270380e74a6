#pragma once

#include <optional>
#include <string>
#include <vector>

#include "argox/ingest.hpp"
#include "argox/series.hpp"

namespace argox {

struct LagRange {
    int min_lag = 4;
    int max_lag = 35;
};

struct QueryLag {
    std::string query;
    int optimal_lag = 0;
    double pearson_r = 0.0;
    bool selected = false;
    bool degenerate = false;  // regressor constant over the window
    double mse = 0.0;
};

/// Per-query optimal lead lags plus the selected high-correlation subset.
/// The same lag is reused at every geographic level downstream.
struct LagTable {
    std::vector<QueryLag> entries;  // sorted by descending pearson_r
    Date window_start{};
    Date window_end{};
    LagRange lag_range;
    double threshold = 0.5;

    std::vector<std::string> selected_queries() const;  // in table order
    const QueryLag* find(const std::string& query) const;
};

struct OptimalLagResult {
    int lag = 0;
    double mse = 0.0;
    bool degenerate = false;
};

/// Lag in [min_lag, max_lag] minimizing the in-sample MSE of the simple
/// regression y_t ~ a + b*x_{t-lag} over the window; ties take the
/// smallest lag. A regressor constant at every lag yields the degenerate
/// result (b = 0, MSE = var(y)).
OptimalLagResult optimal_lag(const DailySeries& deaths, const DailySeries& query,
                             Date window_start, Date window_end, const LagRange& range);

/// Score every panel query against national deaths at its optimal lag;
/// selected iff pearson_r strictly exceeds the threshold.
LagTable score_and_select(const DailySeries& national_deaths, const QueryPanel& panel,
                          Date window_start, Date window_end, double threshold,
                          const LagRange& range);

void write_lag_table_csv(const LagTable& table, const std::string& path);
LagTable read_lag_table_csv(const std::string& path);

}  // namespace argox
