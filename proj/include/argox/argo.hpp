#pragma once

#include <array>

#include "argox/feature_select.hpp"
#include "argox/ingest.hpp"
#include "argox/solver.hpp"

namespace argox {

enum class FeatureMode { Full, GtOnly, ArOnly };

const char* to_string(FeatureMode mode);

struct ArgoConfig {
    int training_days = 56;  // M
    int death_lags = 6;      // I: death lags 0..I
    std::vector<int> case_offsets = {7, 14, 21, 28};
    int horizon_days = 28;
    int smoothing_window = 3;  // moving average over anchor days
    FeatureMode mode = FeatureMode::Full;
    int cv_grid_size = 100;

    void validate() const;
};

/// Everything a fit needs; panels are immutable and shared across threads.
struct ArgoContext {
    const SurveillancePanel& surveillance;
    const QueryPanel& queries;
    const LagTable& lags;
    ArgoConfig cfg;
};

struct ArgoDesign {
    DesignMatrix design;
    Eigen::VectorXd target;
    Eigen::VectorXd predict_row;  // features for the day `anchor + lead`
};

/// Rows t = T-M-lead+1 .. T-lead with target y_{t+lead}. Full mode stacks
/// death lags 0..I, case increments at offsets max(j, lead) (deduplicated),
/// selected queries at lag max(O_k, lead), and six weekday indicators for
/// t+lead; gt_only drops the death/case blocks, ar_only drops the query
/// block.
ArgoDesign build_design(const ArgoContext& ctx, const GeoId& geo, Date anchor, int lead,
                        FeatureMode mode);

struct DayPrediction {
    double value = 0.0;
    double intercept = 0.0;          // smoothed
    Eigen::VectorXd coefficients;    // smoothed, original scale
    std::vector<std::string> names;
    double lambda = 0.0;             // penalty of the anchor-day fit
};

/// Cross-validate the penalty, fit at the anchor day and the two preceding
/// days, average the coefficient vectors, and predict day anchor+lead.
DayPrediction fit_and_predict_day(const ArgoContext& ctx, const GeoId& geo, Date anchor, int lead,
                                  FeatureMode mode);

struct DailyForecast {
    GeoId geo;
    Date anchor{};
    FeatureMode mode = FeatureMode::Full;
    std::vector<double> values;              // horizon_days entries, lead 1..H
    std::vector<DayPrediction> predictions;  // parallel to values
};

DailyForecast daily_forecast(const ArgoContext& ctx, const GeoId& geo, Date anchor,
                             FeatureMode mode);

/// Week h in 1..4 sums daily leads 7(h-1)+1 .. 7h.
std::array<double, 4> weekly_aggregate(const DailyForecast& daily);

}  // namespace argox
