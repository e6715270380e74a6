#pragma once

#include <optional>

#include "argox/argox.hpp"
#include "argox/ensemble_eval.hpp"
#include "argox/preprocess.hpp"
#include "argox/synthgen.hpp"

namespace argox {

struct PipelineConfig {
    struct Paths {
        std::string input_feed;
        std::string truth_feed;
        std::string query_csv;
        std::string out_dir = "out";
        std::string region_override;  // optional CSV
    } paths;

    struct FeatureSelectConfig {
        std::optional<Date> window_start;  // defaults: 2020-04-01 .. 2020-06-30
        std::optional<Date> window_end;
        double threshold = 0.5;
        LagRange lag_range;
    } feature_select;

    IqrConfig preprocess;
    ArgoConfig argo;

    struct ArgoxConfig {
        int cov_window = 30;
        double epsilon = 1e-8;
        std::vector<std::string> alone_states = kDefaultAloneStates;
        std::vector<std::string> excluded_from_constraint = kDefaultConstraintExclusions;
    } argox;

    struct EnsembleConfig {
        int window = 15;
        int min_interval_residuals = 8;
        bool pooled = false;  // per-horizon selection when false
    } ensemble;

    struct BacktestConfig {
        std::optional<Date> first_anchor;  // default: earliest feasible Saturday
        std::optional<Date> last_anchor;   // default: last coverable Saturday
    } backtest;

    int jobs = 1;
    bool clamp_nonneg = false;
    std::string coefficient_trace = "nation";  // none | nation | all

    void validate() const;
    static PipelineConfig from_json_file(const std::string& path);
    std::string to_json() const;  // pretty-printed, deterministic key order
};

/// Write a ready-to-run config next to freshly generated synthetic data.
PipelineConfig synth_default_config(const SynthConfig& synth, const SynthPaths& paths,
                                    const std::string& out_dir);

struct LoadedInputs {
    RegionTable regions;
    SurveillancePanel input;
    SurveillancePanel truth;
    QueryPanel queries;  // raw
};

LoadedInputs load_inputs(const PipelineConfig& cfg);

/// prune -> IQR filter (every level separately) -> regional enrichment,
/// with an on-disk cache keyed by the query file bytes and the relevant
/// config section.
QueryPanel preprocess_queries(const QueryPanel& raw, const PipelineConfig& cfg,
                              const std::string& cache_dir);

/// Long-format dump including the derived region/nation series; reading it
/// back reproduces the panel exactly (used for the preprocess cache and
/// the processed_queries.csv artifact).
void write_query_panel_csv(const QueryPanel& panel, const std::string& path);
QueryPanel read_query_panel_csv(const std::string& path, const RegionTable& regions);

struct BacktestResult {
    std::vector<ForecastRecord> forecasts;
    ScoreTable scores;
    LagTable lags;
    std::vector<Date> anchors;
};

/// Full rolling backtest: preprocess, feature-select once, then for every
/// anchor Saturday run ARGO at all levels, the two second-step variants,
/// persistence, and the winner-takes-all ensemble; score against the truth
/// feed and emit the report files.
BacktestResult run_backtest(const PipelineConfig& cfg);

/// Forecast stage only (writes forecasts.csv, lag_table.csv, traces,
/// run_metadata.json; no truth feed needed).
std::vector<ForecastRecord> run_forecast_stage(const PipelineConfig& cfg);

/// Score an existing forecasts.csv against the truth feed and emit reports.
ScoreTable run_evaluate_stage(const PipelineConfig& cfg, const std::string& forecasts_csv);

}  // namespace argox
