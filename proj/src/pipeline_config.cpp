#include <fstream>

#include "argox/errors.hpp"
#include "argox/pipeline.hpp"
#include "json.hpp"

namespace argox {

using nlohmann::json;

namespace {

std::optional<Date> opt_date(const json& j, const char* key) {
    if (!j.contains(key)) return std::nullopt;
    std::string s = j.at(key).get<std::string>();
    if (s.empty()) return std::nullopt;
    return parse_date(s);
}

std::string date_or_empty(const std::optional<Date>& d) {
    return d ? to_string(*d) : std::string();
}

}  // namespace

void PipelineConfig::validate() const {
    preprocess.validate();
    argo.validate();
    if (feature_select.lag_range.min_lag < 1 ||
        feature_select.lag_range.min_lag > feature_select.lag_range.max_lag)
        fail(ErrorKind::ConfigError, "feature_select lag range is malformed");
    if (feature_select.window_start && feature_select.window_end &&
        *feature_select.window_start > *feature_select.window_end)
        fail(ErrorKind::ConfigError, "feature_select window dates are out of order");
    if (backtest.first_anchor && backtest.last_anchor &&
        *backtest.first_anchor > *backtest.last_anchor)
        fail(ErrorKind::ConfigError, "backtest anchors are out of order");
    if (argox.cov_window < 2) fail(ErrorKind::ConfigError, "argox cov_window must be >= 2");
    if (argox.epsilon <= 0.0) fail(ErrorKind::ConfigError, "argox epsilon must be positive");
    if (ensemble.window < 1) fail(ErrorKind::ConfigError, "ensemble window must be >= 1");
    if (ensemble.min_interval_residuals < 2)
        fail(ErrorKind::ConfigError, "ensemble min_interval_residuals must be >= 2");
    if (jobs < 1) fail(ErrorKind::ConfigError, "jobs must be >= 1");
    if (coefficient_trace != "none" && coefficient_trace != "nation" &&
        coefficient_trace != "all")
        fail(ErrorKind::ConfigError, "coefficient_trace must be none|nation|all");
}

PipelineConfig PipelineConfig::from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::IoError, "cannot open config " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        fail(ErrorKind::ConfigError, path + ": " + e.what());
    }

    PipelineConfig cfg;
    try {
        if (j.contains("paths")) {
            const auto& p = j["paths"];
            cfg.paths.input_feed = p.value("input_feed", cfg.paths.input_feed);
            cfg.paths.truth_feed = p.value("truth_feed", cfg.paths.truth_feed);
            cfg.paths.query_csv = p.value("query_csv", cfg.paths.query_csv);
            cfg.paths.out_dir = p.value("out_dir", cfg.paths.out_dir);
            cfg.paths.region_override = p.value("region_override", cfg.paths.region_override);
        }
        if (j.contains("feature_select")) {
            const auto& f = j["feature_select"];
            cfg.feature_select.window_start = opt_date(f, "window_start");
            cfg.feature_select.window_end = opt_date(f, "window_end");
            cfg.feature_select.threshold = f.value("threshold", cfg.feature_select.threshold);
            cfg.feature_select.lag_range.min_lag =
                f.value("lag_min", cfg.feature_select.lag_range.min_lag);
            cfg.feature_select.lag_range.max_lag =
                f.value("lag_max", cfg.feature_select.lag_range.max_lag);
        }
        if (j.contains("preprocess")) {
            const auto& p = j["preprocess"];
            cfg.preprocess.upper_quantile = p.value("upper_quantile", cfg.preprocess.upper_quantile);
            cfg.preprocess.lower_quantile = p.value("lower_quantile", cfg.preprocess.lower_quantile);
            cfg.preprocess.sigma_mult = p.value("sigma_mult", cfg.preprocess.sigma_mult);
            cfg.preprocess.rolling_window_days =
                p.value("rolling_window_days", cfg.preprocess.rolling_window_days);
            cfg.preprocess.replacement_window_days =
                p.value("replacement_window_days", cfg.preprocess.replacement_window_days);
        }
        if (j.contains("argo")) {
            const auto& a = j["argo"];
            cfg.argo.training_days = a.value("training_days", cfg.argo.training_days);
            cfg.argo.death_lags = a.value("death_lags", cfg.argo.death_lags);
            if (a.contains("case_offsets"))
                cfg.argo.case_offsets = a["case_offsets"].get<std::vector<int>>();
            cfg.argo.horizon_days = a.value("horizon_days", cfg.argo.horizon_days);
            cfg.argo.smoothing_window = a.value("smoothing_window", cfg.argo.smoothing_window);
            cfg.argo.cv_grid_size = a.value("cv_grid_size", cfg.argo.cv_grid_size);
        }
        if (j.contains("argox")) {
            const auto& a = j["argox"];
            cfg.argox.cov_window = a.value("cov_window", cfg.argox.cov_window);
            cfg.argox.epsilon = a.value("epsilon", cfg.argox.epsilon);
            if (a.contains("alone_states"))
                cfg.argox.alone_states = a["alone_states"].get<std::vector<std::string>>();
            if (a.contains("excluded_from_constraint"))
                cfg.argox.excluded_from_constraint =
                    a["excluded_from_constraint"].get<std::vector<std::string>>();
        }
        if (j.contains("ensemble")) {
            const auto& e = j["ensemble"];
            cfg.ensemble.window = e.value("window", cfg.ensemble.window);
            cfg.ensemble.min_interval_residuals =
                e.value("min_interval_residuals", cfg.ensemble.min_interval_residuals);
            cfg.ensemble.pooled = e.value("pooled", cfg.ensemble.pooled);
        }
        if (j.contains("backtest")) {
            const auto& b = j["backtest"];
            cfg.backtest.first_anchor = opt_date(b, "first_anchor");
            cfg.backtest.last_anchor = opt_date(b, "last_anchor");
        }
        cfg.jobs = j.value("jobs", cfg.jobs);
        cfg.clamp_nonneg = j.value("clamp_nonneg", cfg.clamp_nonneg);
        cfg.coefficient_trace = j.value("coefficient_trace", cfg.coefficient_trace);
    } catch (const json::exception& e) {
        fail(ErrorKind::ConfigError, path + ": " + e.what());
    }
    cfg.validate();
    return cfg;
}

std::string PipelineConfig::to_json() const {
    json j;
    j["paths"] = {{"input_feed", paths.input_feed},
                  {"truth_feed", paths.truth_feed},
                  {"query_csv", paths.query_csv},
                  {"out_dir", paths.out_dir},
                  {"region_override", paths.region_override}};
    j["feature_select"] = {{"window_start", date_or_empty(feature_select.window_start)},
                           {"window_end", date_or_empty(feature_select.window_end)},
                           {"threshold", feature_select.threshold},
                           {"lag_min", feature_select.lag_range.min_lag},
                           {"lag_max", feature_select.lag_range.max_lag}};
    j["preprocess"] = {{"upper_quantile", preprocess.upper_quantile},
                       {"lower_quantile", preprocess.lower_quantile},
                       {"sigma_mult", preprocess.sigma_mult},
                       {"rolling_window_days", preprocess.rolling_window_days},
                       {"replacement_window_days", preprocess.replacement_window_days}};
    j["argo"] = {{"training_days", argo.training_days},
                 {"death_lags", argo.death_lags},
                 {"case_offsets", argo.case_offsets},
                 {"horizon_days", argo.horizon_days},
                 {"smoothing_window", argo.smoothing_window},
                 {"cv_grid_size", argo.cv_grid_size}};
    j["argox"] = {{"cov_window", argox.cov_window},
                  {"epsilon", argox.epsilon},
                  {"alone_states", argox.alone_states},
                  {"excluded_from_constraint", argox.excluded_from_constraint}};
    j["ensemble"] = {{"window", ensemble.window},
                     {"min_interval_residuals", ensemble.min_interval_residuals},
                     {"pooled", ensemble.pooled}};
    j["backtest"] = {{"first_anchor", date_or_empty(backtest.first_anchor)},
                     {"last_anchor", date_or_empty(backtest.last_anchor)}};
    j["jobs"] = jobs;
    j["clamp_nonneg"] = clamp_nonneg;
    j["coefficient_trace"] = coefficient_trace;
    return j.dump(2) + "\n";
}

PipelineConfig synth_default_config(const SynthConfig& synth, const SynthPaths& paths,
                                    const std::string& out_dir) {
    PipelineConfig cfg;
    cfg.paths.input_feed = paths.input_csv;
    cfg.paths.truth_feed = paths.truth_csv;
    cfg.paths.query_csv = paths.query_csv;
    cfg.paths.out_dir = out_dir;
    // Selection window: weeks 6..18 of the synthetic span, leaving room for
    // the longest planted lag before it and the backtest after it.
    cfg.feature_select.window_start = synth.start + std::chrono::days(6 * 7);
    cfg.feature_select.window_end = synth.start + std::chrono::days(18 * 7 - 1);
    cfg.feature_select.lag_range = {synth.lag_min, synth.lag_max};
    return cfg;
}

}  // namespace argox
