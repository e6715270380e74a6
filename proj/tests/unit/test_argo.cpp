#include "argox/argo.hpp"

#include <filesystem>
#include <fstream>

#include "../common/oracles.hpp"
#include "argox/errors.hpp"
#include "doctest.h"

using namespace argox;
namespace fs = std::filesystem;

namespace {

struct World {
    RegionTable regions;
    SurveillancePanel surveillance;
    QueryPanel queries;
    LagTable lags;
};

// Two-state world (CT, ME) over `days` days starting 2020-01-05 (Sunday),
// with deaths/cases built from the given per-day generator and two query
// series per state.
World make_world(int days,
                 const std::function<double(const std::string&, int)>& deaths_fn,
                 const std::function<double(const std::string&, int)>& cases_fn,
                 const std::function<double(const std::string&, const std::string&, int)>&
                     query_fn,
                 std::vector<std::pair<std::string, int>> lags = {{"qa", 6}, {"qb", 10}}) {
    Date start = parse_date("2020-01-05");
    std::string surv = "date,state,cases,deaths\n";
    std::string quer = "date,geo,query,value\n";
    for (const char* s : {"CT", "ME"}) {
        double cum_d = 0, cum_c = 0;
        for (int t = 0; t < days; ++t) {
            cum_d += deaths_fn(s, t);
            cum_c += cases_fn(s, t);
            surv += to_string(start + std::chrono::days(t)) + "," + s + "," +
                    std::to_string(cum_c) + "," + std::to_string(cum_d) + "\n";
        }
        for (int t = 0; t < days; ++t)
            for (const auto& [q, lag] : lags)
                quer += to_string(start + std::chrono::days(t)) + "," + s + "," + q + "," +
                        std::to_string(std::max(0.0, query_fn(s, q, t))) + "\n";
    }
    fs::path sp = fs::temp_directory_path() / "argo_surv.csv";
    fs::path qp = fs::temp_directory_path() / "argo_quer.csv";
    std::ofstream(sp) << surv;
    std::ofstream(qp) << quer;
    World w{RegionTable(), {}, {}, {}};
    w.surveillance = load_surveillance(sp.string(), SurveillanceSchema::State,
                                       SourceTag::InputFeed, w.regions);
    w.queries = load_query_panel(qp.string(), w.regions);
    fs::remove(sp);
    fs::remove(qp);
    for (const auto& [q, lag] : lags) {
        QueryLag e;
        e.query = q;
        e.optimal_lag = lag;
        e.pearson_r = 0.9;
        e.selected = true;
        w.lags.entries.push_back(e);
    }
    return w;
}

}  // namespace

TEST_CASE("design dimensions, case-offset collapse and lag adjustment") {
    auto flat = [](const std::string&, int) { return 2.0; };
    auto qflat = [](const std::string&, const std::string&, int) { return 3.0; };
    World w = make_world(140, flat, flat, qflat, {{"qa", 5}, {"qb", 10}});
    ArgoConfig cfg;
    ArgoContext ctx{w.surveillance, w.queries, w.lags, cfg};
    Date anchor = parse_date("2020-05-16");  // Saturday well inside the span

    SUBCASE("lead 1 keeps all four case offsets") {
        ArgoDesign d = build_design(ctx, GeoId::state("CT"), anchor, 1, FeatureMode::Full);
        CHECK(d.design.rows() == cfg.training_days);
        // 7 death lags + 4 case offsets + 2 queries + 6 weekday indicators
        CHECK(d.design.cols() == 7 + 4 + 2 + 6);
        CHECK(d.design.names[7] == "cases_lag_7");
        CHECK(d.design.names[10] == "cases_lag_28");
    }
    SUBCASE("lead 28 collapses the case offsets to one column") {
        ArgoDesign d = build_design(ctx, GeoId::state("CT"), anchor, 28, FeatureMode::Full);
        CHECK(d.design.cols() == 7 + 1 + 2 + 6);
        CHECK(d.design.names[7] == "cases_lag_28");
    }
    SUBCASE("query lag is adjusted to max(optimal, lead)") {
        ArgoDesign d7 = build_design(ctx, GeoId::state("CT"), anchor, 7, FeatureMode::Full);
        // qa has optimal lag 5 < 7, so its feature at the prediction row is
        // the query value on the anchor date itself (t + 7 - 7).
        World shifted = make_world(
            140, flat, flat,
            [](const std::string&, const std::string& q, int t) {
                return q == "qa" && t == 132 ? 55.0 : 3.0;  // anchor day index
            },
            {{"qa", 5}, {"qb", 10}});
        ArgoContext ctx2{shifted.surveillance, shifted.queries, shifted.lags, cfg};
        ArgoDesign d = build_design(ctx2, GeoId::state("CT"), anchor, 7, FeatureMode::Full);
        auto qa_col = std::find(d.design.names.begin(), d.design.names.end(), "query:qa") -
                      d.design.names.begin();
        CHECK(d.predict_row[qa_col] == 55.0);
        CHECK(d7.design.names == d.design.names);
    }
    SUBCASE("gt_only and ar_only drop the right blocks") {
        ArgoDesign gt = build_design(ctx, GeoId::state("CT"), anchor, 1, FeatureMode::GtOnly);
        CHECK(gt.design.cols() == 2 + 6);
        ArgoDesign ar = build_design(ctx, GeoId::state("CT"), anchor, 1, FeatureMode::ArOnly);
        CHECK(ar.design.cols() == 7 + 4 + 6);
        for (const auto& n : ar.design.names) CHECK(n.substr(0, 6) != "query:");
    }
}

TEST_CASE("design rows reference the documented dates") {
    // Deaths encode the day index so every cell is checkable.
    auto ramp = [](const std::string&, int t) { return static_cast<double>(t); };
    auto flat = [](const std::string&, int) { return 1.0; };
    auto qflat = [](const std::string&, const std::string&, int) { return 2.0; };
    World w = make_world(140, ramp, flat, qflat);
    ArgoConfig cfg;
    ArgoContext ctx{w.surveillance, w.queries, w.lags, cfg};
    Date anchor = parse_date("2020-05-16");
    int anchor_idx = static_cast<int>((anchor - parse_date("2020-01-05")).count());

    const int lead = 3;
    ArgoDesign d = build_design(ctx, GeoId::state("CT"), anchor, lead, FeatureMode::Full);
    // Row r: t = anchor - (M + lead - 1) + r; target y_{t+lead};
    // deaths_lag_i column holds y_{t-i}.
    for (long r = 0; r < d.design.rows(); ++r) {
        int t_idx = anchor_idx - (cfg.training_days + lead - 1) + static_cast<int>(r);
        CHECK(d.target[r] == t_idx + lead);
        CHECK(d.design.X(r, 0) == t_idx);
        CHECK(d.design.X(r, 6) == t_idx - 6);
    }
    CHECK(d.predict_row[0] == anchor_idx);
}

TEST_CASE("constant world predicts the constant") {
    auto flat_d = [](const std::string&, int) { return 4.0; };
    auto flat_c = [](const std::string&, int) { return 9.0; };
    auto flat_q = [](const std::string&, const std::string&, int) { return 3.0; };
    World w = make_world(160, flat_d, flat_c, flat_q);
    ArgoConfig cfg;
    ArgoContext ctx{w.surveillance, w.queries, w.lags, cfg};
    DayPrediction p =
        fit_and_predict_day(ctx, GeoId::state("CT"), parse_date("2020-05-16"), 5, FeatureMode::Full);
    CHECK(p.value == doctest::Approx(4.0).epsilon(1e-6));
}

TEST_CASE("weekly aggregation sums blocks of seven") {
    DailyForecast f;
    f.values.assign(28, 1.0);
    CHECK(weekly_aggregate(f) == std::array<double, 4>{7, 7, 7, 7});
    for (int i = 0; i < 28; ++i) f.values[static_cast<size_t>(i)] = i + 1;
    CHECK(weekly_aggregate(f) == std::array<double, 4>{28, 77, 126, 175});
    f.values[5] = -3.0;  // negatives pass through, no clamping
    auto w = weekly_aggregate(f);
    CHECK(w[0] == doctest::Approx(28 - 6 - 3));
}

TEST_CASE("weekly aggregation is linear") {
    oracle::Rng rng(31);
    DailyForecast f, g, combo;
    f.values.resize(28);
    g.values.resize(28);
    combo.values.resize(28);
    const double a = 2.5;
    for (int i = 0; i < 28; ++i) {
        f.values[static_cast<size_t>(i)] = rng.normal();
        g.values[static_cast<size_t>(i)] = rng.normal();
        combo.values[static_cast<size_t>(i)] =
            a * f.values[static_cast<size_t>(i)] + g.values[static_cast<size_t>(i)];
    }
    auto wf = weekly_aggregate(f), wg = weekly_aggregate(g), wc = weekly_aggregate(combo);
    for (int h = 0; h < 4; ++h)
        CHECK(wc[static_cast<size_t>(h)] ==
              doctest::Approx(a * wf[static_cast<size_t>(h)] + wg[static_cast<size_t>(h)]));
}

TEST_CASE("identical smoothing inputs leave coefficients unchanged") {
    // A fully deterministic constant world fits the same model at every
    // anchor day, so the three-day average equals each fit.
    auto flat_d = [](const std::string&, int) { return 6.0; };
    auto flat_c = [](const std::string&, int) { return 2.0; };
    auto flat_q = [](const std::string&, const std::string&, int) { return 1.0; };
    World w = make_world(160, flat_d, flat_c, flat_q);
    ArgoConfig cfg;
    ArgoContext ctx{w.surveillance, w.queries, w.lags, cfg};
    Date anchor = parse_date("2020-05-16");
    DayPrediction smoothed =
        fit_and_predict_day(ctx, GeoId::state("CT"), anchor, 2, FeatureMode::Full);
    ArgoDesign d = build_design(ctx, GeoId::state("CT"), anchor, 2, FeatureMode::Full);
    FitResult single = lasso_fit(d.design, d.target,
                                 cross_validate_lambda(d.design, d.target, cfg.cv_grid_size));
    CHECK(smoothed.intercept == doctest::Approx(single.intercept).epsilon(1e-9));
    for (long j = 0; j < single.beta.size(); ++j)
        CHECK(smoothed.coefficients[j] == doctest::Approx(single.beta[j]).epsilon(1e-9));
}

TEST_CASE("ar_only forecasts ignore query corruption") {
    oracle::Rng rng(32);
    auto noisy_d = [&](const std::string&, int t) {
        return 10.0 + 3.0 * std::sin(t / 9.0) + 0.1 * ((t * 37) % 11);
    };
    auto noisy_c = [](const std::string&, int t) { return 30.0 + 2.0 * std::cos(t / 11.0); };
    auto q1 = [](const std::string&, const std::string&, int t) { return 5.0 + (t % 7); };
    auto q2 = [](const std::string&, const std::string&, int t) { return 500.0 - (t % 13) * 30.0; };
    World w1 = make_world(160, noisy_d, noisy_c, q1);
    World w2 = make_world(160, noisy_d, noisy_c, q2);  // corrupted queries
    ArgoConfig cfg;
    cfg.mode = FeatureMode::ArOnly;
    ArgoContext c1{w1.surveillance, w1.queries, w1.lags, cfg};
    ArgoContext c2{w2.surveillance, w2.queries, w2.lags, cfg};
    for (int lead : {1, 9, 28}) {
        DayPrediction p1 =
            fit_and_predict_day(c1, GeoId::state("CT"), parse_date("2020-05-16"), lead,
                                FeatureMode::ArOnly);
        DayPrediction p2 =
            fit_and_predict_day(c2, GeoId::state("CT"), parse_date("2020-05-16"), lead,
                                FeatureMode::ArOnly);
        CHECK(p1.value == p2.value);
    }
}

TEST_CASE("design construction is deterministic") {
    auto d_fn = [](const std::string&, int t) { return 5.0 + (t % 9); };
    auto c_fn = [](const std::string&, int t) { return 11.0 + (t % 5); };
    auto q_fn = [](const std::string&, const std::string& q, int t) {
        return q == "qa" ? 2.0 + (t % 4) : 8.0 - (t % 3);
    };
    World w1 = make_world(150, d_fn, c_fn, q_fn);
    World w2 = make_world(150, d_fn, c_fn, q_fn);
    ArgoConfig cfg;
    ArgoContext c1{w1.surveillance, w1.queries, w1.lags, cfg};
    ArgoContext c2{w2.surveillance, w2.queries, w2.lags, cfg};
    ArgoDesign a = build_design(c1, GeoId::state("ME"), parse_date("2020-05-23"), 4,
                                FeatureMode::Full);
    ArgoDesign b = build_design(c2, GeoId::state("ME"), parse_date("2020-05-23"), 4,
                                FeatureMode::Full);
    CHECK(a.design.X == b.design.X);
    CHECK(a.target == b.target);
    CHECK(a.predict_row == b.predict_row);
    CHECK(a.design.names == b.design.names);
}

TEST_CASE("missing history is rejected") {
    auto flat = [](const std::string&, int) { return 1.0; };
    auto qflat = [](const std::string&, const std::string&, int) { return 1.0; };
    World w = make_world(70, flat, flat, qflat);
    ArgoConfig cfg;
    ArgoContext ctx{w.surveillance, w.queries, w.lags, cfg};
    CHECK_THROWS_AS(build_design(ctx, GeoId::state("CT"), parse_date("2020-02-22"), 28,
                                 FeatureMode::Full),
                    Error);
}
