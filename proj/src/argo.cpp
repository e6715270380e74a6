#include "argox/argo.hpp"

#include <algorithm>
#include <set>

#include "argox/errors.hpp"

namespace argox {

const char* to_string(FeatureMode mode) {
    switch (mode) {
        case FeatureMode::Full: return "full";
        case FeatureMode::GtOnly: return "gt_only";
        case FeatureMode::ArOnly: return "ar_only";
    }
    return "?";
}

void ArgoConfig::validate() const {
    if (training_days < 28) fail(ErrorKind::ConfigError, "training_days must be >= 28");
    if (death_lags < 0) fail(ErrorKind::ConfigError, "death_lags must be >= 0");
    if (horizon_days < 1) fail(ErrorKind::ConfigError, "horizon_days must be >= 1");
    if (smoothing_window < 1) fail(ErrorKind::ConfigError, "smoothing_window must be >= 1");
    if (cv_grid_size < 1) fail(ErrorKind::ConfigError, "cv_grid_size must be >= 1");
}

ArgoDesign build_design(const ArgoContext& ctx, const GeoId& geo, Date anchor, int lead,
                        FeatureMode mode) {
    const ArgoConfig& cfg = ctx.cfg;
    const long m = cfg.training_days;
    const auto day = [](int k) { return std::chrono::days(k); };

    bool want_ar = mode != FeatureMode::GtOnly;
    bool want_gt = mode != FeatureMode::ArOnly;

    std::vector<int> case_lags;
    if (want_ar) {
        std::set<int> dedup;
        for (int j : cfg.case_offsets) dedup.insert(std::max(j, lead));
        case_lags.assign(dedup.begin(), dedup.end());
    }

    std::vector<std::string> selected = ctx.lags.selected_queries();

    ArgoDesign out;
    auto& names = out.design.names;
    if (want_ar) {
        for (int i = 0; i <= cfg.death_lags; ++i) names.push_back("deaths_lag_" + std::to_string(i));
        for (int j : case_lags) names.push_back("cases_lag_" + std::to_string(j));
    }
    if (want_gt)
        for (const auto& q : selected) names.push_back("query:" + q);
    static const char* kWeekdayNames[6] = {"wd_mon", "wd_tue", "wd_wed",
                                           "wd_thu", "wd_fri", "wd_sat"};
    for (const char* w : kWeekdayNames) names.push_back(w);

    const long p = static_cast<long>(names.size());
    out.design.X.resize(m, p);
    out.target.resize(m);
    out.predict_row.resize(p);

    const DailySeries& deaths = ctx.surveillance.deaths(geo);

    // Rows r = 0..m-1 carry t = anchor - (m + lead - 1) + r; the prediction
    // row reuses the same feature map at t = anchor.
    const Date t0 = anchor - day(static_cast<int>(m + lead - 1));
    const Date t_last = anchor - day(lead);

    long col = 0;
    auto fill = [&](const std::vector<double>& history, double predict_value) {
        for (long r = 0; r < m; ++r) out.design.X(r, col) = history[static_cast<size_t>(r)];
        out.predict_row[col] = predict_value;
        ++col;
    };

    if (want_ar) {
        const DailySeries& cases = ctx.surveillance.cases(geo);
        for (int i = 0; i <= cfg.death_lags; ++i)
            fill(deaths.slice(t0 - day(i), t_last - day(i)), deaths.at(anchor - day(i)));
        for (int j : case_lags)
            fill(cases.slice(t0 + day(lead - j), t_last + day(lead - j)),
                 cases.at(anchor + day(lead - j)));
    }
    if (want_gt)
        for (const auto& q : selected) {
            int adj = std::max(ctx.lags.find(q)->optimal_lag, lead);
            fill(ctx.queries.values(geo, q, t0 + day(lead - adj), t_last + day(lead - adj)),
                 ctx.queries.values(geo, q, anchor + day(lead - adj),
                                    anchor + day(lead - adj))[0]);
        }
    for (int w = 0; w < 6; ++w) {
        for (long r = 0; r < m; ++r)
            out.design.X(r, col) = weekday_indicators(t0 + day(static_cast<int>(r) + lead))[w];
        out.predict_row[col] = weekday_indicators(anchor + day(lead))[w];
        ++col;
    }

    for (long r = 0; r < m; ++r) out.target[r] = deaths.at(t0 + day(static_cast<int>(r) + lead));
    out.design.finalize();
    return out;
}

namespace {

FitResult fit_anchor_day(const ArgoContext& ctx, const GeoId& geo, Date anchor, int lead,
                         FeatureMode mode) {
    ArgoDesign d = build_design(ctx, geo, anchor, lead, mode);
    double lambda = cross_validate_lambda(d.design, d.target, ctx.cfg.cv_grid_size);
    return lasso_fit(d.design, d.target, lambda);
}

}  // namespace

DayPrediction fit_and_predict_day(const ArgoContext& ctx, const GeoId& geo, Date anchor, int lead,
                                  FeatureMode mode) {
    ArgoDesign today = build_design(ctx, geo, anchor, lead, mode);
    double lambda = cross_validate_lambda(today.design, today.target, ctx.cfg.cv_grid_size);
    FitResult fit = lasso_fit(today.design, today.target, lambda);

    double intercept_sum = fit.intercept;
    Eigen::VectorXd beta_sum = fit.beta;
    int count = 1;
    for (int back = 1; back < ctx.cfg.smoothing_window; ++back) {
        try {
            FitResult prev =
                fit_anchor_day(ctx, geo, anchor - std::chrono::days(back), lead, mode);
            intercept_sum += prev.intercept;
            beta_sum += prev.beta;
            ++count;
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::InsufficientHistory) throw;
            break;  // shorter history: average over what exists
        }
    }

    DayPrediction out;
    out.intercept = intercept_sum / count;
    out.coefficients = beta_sum / count;
    out.names = today.design.names;
    out.lambda = fit.lambda;
    out.value = out.intercept + today.predict_row.dot(out.coefficients);
    return out;
}

DailyForecast daily_forecast(const ArgoContext& ctx, const GeoId& geo, Date anchor,
                             FeatureMode mode) {
    ctx.cfg.validate();
    DailyForecast out;
    out.geo = geo;
    out.anchor = anchor;
    out.mode = mode;
    for (int lead = 1; lead <= ctx.cfg.horizon_days; ++lead) {
        DayPrediction p = fit_and_predict_day(ctx, geo, anchor, lead, mode);
        out.values.push_back(p.value);
        out.predictions.push_back(std::move(p));
    }
    return out;
}

std::array<double, 4> weekly_aggregate(const DailyForecast& daily) {
    if (daily.values.size() < 28)
        fail(ErrorKind::InsufficientHistory, "weekly aggregation needs 28 daily values");
    std::array<double, 4> weeks{};
    for (int h = 0; h < 4; ++h)
        for (int i = 7 * h; i < 7 * (h + 1); ++i) weeks[static_cast<size_t>(h)] += daily.values[static_cast<size_t>(i)];
    return weeks;
}

}  // namespace argox
