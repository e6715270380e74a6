#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "argox/calendar.hpp"
#include "argox/geo.hpp"

namespace argox {

enum class MethodId { Argo, Argox2Step, ArgoxNatConstraint, Naive, Ensemble };

const char* to_string(MethodId m);
MethodId method_from_string(const std::string& s);

/// The ensemble chooses among exactly these, in tie-break priority order.
inline constexpr MethodId kConstituents[3] = {MethodId::Argo, MethodId::Argox2Step,
                                              MethodId::ArgoxNatConstraint};

struct ForecastRecord {
    GeoId geo;
    MethodId method = MethodId::Argo;
    Date forecast_date{};  // anchor Saturday
    int horizon = 1;       // weeks ahead, 1..4
    double point = 0.0;
    std::optional<double> lo95, hi95;
    std::optional<MethodId> selected_method;  // ensemble rows only
    bool flagged = false;                     // fallback selection or omitted interval

    Date target_week_end() const { return forecast_date + std::chrono::days(7 * horizon); }
};

struct WinnerResult {
    MethodId method = MethodId::Argo;
    bool fallback = false;  // not enough history; defaulted to the first constituent
};

/// Argmin of trailing-`window` mean squared error over the three
/// constituents (errors ordered oldest to newest, one entry per realized
/// week). Ties keep the earlier constituent in priority order. Any
/// constituent with fewer than `window` realized errors forces the
/// flagged fallback.
WinnerResult select_winner(const std::vector<double>& argo_errors,
                           const std::vector<double>& two_step_errors,
                           const std::vector<double>& nat_constraint_errors, int window = 15);

/// point +- 1.96 * std of the trailing `window` residuals (sample std).
/// Fewer than `min_residuals` residuals: no interval.
std::optional<std::pair<double, double>> build_interval(double point,
                                                        const std::vector<double>& residuals,
                                                        int window = 15, int min_residuals = 8);

struct ScoreRow {
    GeoId geo;
    MethodId method = MethodId::Argo;
    int horizon = 1;
    double rmse = 0.0;
    double mae = 0.0;
    std::optional<double> pearson_r;  // null when either side is degenerate
    int n_weeks = 0;
    int dropped = 0;                    // target weeks without truth
    std::optional<double> coverage;     // share of intervals containing truth
    int n_intervals = 0;
};

struct ScoreTable {
    std::vector<ScoreRow> rows;  // sorted by (geo, method, horizon)
};

/// Weekly truth for (geo, target week ending on the given Saturday);
/// nullopt when the truth feed does not cover the week.
using TruthFn = std::function<std::optional<double>(const GeoId&, Date)>;

/// Align forecasts with the truth feed on target week ends inside
/// [window_start, window_end] and compute rmse / mae / Pearson r per
/// (geo, method, horizon). Throws EmptyEvaluation when nothing aligns.
ScoreTable score(const std::vector<ForecastRecord>& forecasts, const TruthFn& truth,
                 Date window_start, Date window_end);

/// Write forecasts.csv, scores_by_state.csv, scores_summary.csv,
/// ensemble_selection.csv and coverage.csv. Deterministic: identical
/// inputs produce byte-identical files.
void emit_reports(const ScoreTable& scores, const std::vector<ForecastRecord>& forecasts,
                  const std::string& out_dir);

std::vector<ForecastRecord> read_forecasts_csv(const std::string& path);
void write_forecasts_csv(const std::vector<ForecastRecord>& forecasts, const std::string& path);

}  // namespace argox
