#include "argox/preprocess.hpp"

#include <cmath>
#include <set>

#include "argox/errors.hpp"
#include "argox/stats.hpp"

namespace argox {

void IqrConfig::validate() const {
    if (!(lower_quantile > 0.0 && lower_quantile < upper_quantile && upper_quantile < 1.0))
        fail(ErrorKind::ConfigError, "iqr quantiles must satisfy 0 < lower < upper < 1");
    if (sigma_mult <= 0.0) fail(ErrorKind::ConfigError, "iqr sigma_mult must be positive");
    if (rolling_window_days < 1 || replacement_window_days < 1)
        fail(ErrorKind::ConfigError, "iqr windows must be >= 1");
}

namespace {

// Survivors of the median rule among the (query -> mean) map.
std::set<std::string> median_survivors(const std::map<std::string, double>& means) {
    std::vector<double> all;
    all.reserve(means.size());
    for (const auto& [q, m] : means) all.push_back(m);
    double med = quantile_type7(all, 0.5);
    std::set<std::string> kept;
    for (const auto& [q, m] : means)
        if (m >= med) kept.insert(q);
    return kept;
}

}  // namespace

QueryPanel prune_low_volume(const QueryPanel& panel) {
    if (panel.queries().empty()) fail(ErrorKind::EmptyPanel, "prune on empty panel");

    const RegionTable& regions = panel.regions();
    std::set<std::string> kept;
    for (int level = 0; level < 3; ++level) {
        std::map<std::string, double> means;
        for (const auto& q : panel.queries()) {
            double total = 0.0;
            long count = 0;
            auto add = [&](const GeoId& geo) {
                if (!panel.has_series(geo, q)) return;
                for (double v : panel.series(geo, q).values) total += v;
                count += panel.n_days();
            };
            if (level == 0) add(GeoId::nation());
            if (level == 1)
                for (const auto& r : regions.region_codes()) add(GeoId::region(r));
            if (level == 2)
                for (const auto& s : regions.state_codes()) add(GeoId::state(s));
            if (count > 0) means[q] = total / static_cast<double>(count);
        }
        if (means.empty()) continue;
        auto survivors = median_survivors(means);
        kept.insert(survivors.begin(), survivors.end());
    }

    std::vector<std::string> drop;
    for (const auto& q : panel.queries())
        if (!kept.count(q)) drop.push_back(q);
    QueryPanel out = panel;
    if (!drop.empty()) out.drop_queries(drop);
    return out;
}

DailySeries iqr_filter(const DailySeries& series, const IqrConfig& cfg) {
    cfg.validate();
    const auto n = static_cast<long>(series.values.size());
    if (n <= cfg.replacement_window_days)
        fail(ErrorKind::SeriesTooShort, series.geo.code + "/" + series.variable + " has " +
                                            std::to_string(n) + " days");

    // Thresholds are fixed once from the raw input.
    double q_hi = quantile_type7(series.values, cfg.upper_quantile);
    double q_lo = quantile_type7(series.values, cfg.lower_quantile);

    DailySeries out = series;
    auto& v = out.values;
    for (long t = cfg.replacement_window_days; t < n; ++t) {
        bool small_outlier = v[t] < q_lo;
        bool large_outlier = false;
        if (v[t] > q_hi) {
            long w0 = std::max<long>(0, t - cfg.rolling_window_days);
            std::span<const double> window(v.data() + w0, static_cast<size_t>(t - w0));
            large_outlier = v[t] > mean(window) + cfg.sigma_mult * sample_std(window);
        }
        if (small_outlier || large_outlier) {
            double repl = 0.0;
            for (long k = t - cfg.replacement_window_days; k < t; ++k) repl += v[k];
            v[t] = repl / cfg.replacement_window_days;
        }
    }
    return out;
}

QueryPanel iqr_filter_panel(const QueryPanel& panel, const IqrConfig& cfg) {
    QueryPanel out = panel;
    const RegionTable& regions = panel.regions();
    std::vector<GeoId> geos;
    geos.push_back(GeoId::nation());
    for (const auto& r : regions.region_codes()) geos.push_back(GeoId::region(r));
    for (const auto& s : regions.state_codes()) geos.push_back(GeoId::state(s));
    for (const auto& geo : geos)
        for (const auto& q : panel.queries())
            if (out.has_series(geo, q))
                out.series_mut(geo, q) = iqr_filter(out.series(geo, q), cfg);
    return out;
}

QueryPanel enrich_states(const QueryPanel& panel) {
    QueryPanel out = panel;
    const RegionTable& regions = panel.regions();
    for (const auto& state : regions.state_codes()) {
        GeoId geo = GeoId::state(state);
        GeoId region = regions.region_of(geo);
        for (const auto& q : panel.queries()) {
            if (!out.has_series(geo, q) || !panel.has_series(region, q)) continue;
            auto& sv = out.series_mut(geo, q).values;
            const auto& rv = panel.series(region, q).values;
            for (size_t i = 0; i < sv.size(); ++i)
                sv[i] = (2.0 / 3.0) * sv[i] + (1.0 / 3.0) * rv[i];
        }
    }
    return out;
}

}  // namespace argox
