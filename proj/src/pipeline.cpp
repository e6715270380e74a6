#include "argox/pipeline.hpp"

#include <algorithm>
#include <deque>
#include <filesystem>
#include <fstream>
#include <set>

#include "argox/csv.hpp"
#include "argox/errors.hpp"
#include "argox/parallel.hpp"
#include "json.hpp"

namespace argox {

namespace fs = std::filesystem;

namespace {

std::uint64_t fnv64(std::string_view bytes, std::uint64_t h = 0xcbf29ce484222325ULL) {
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::uint64_t fnv64_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorKind::IoError, "cannot open " + path);
    std::uint64_t h = 0xcbf29ce484222325ULL;
    char buf[1 << 16];
    while (in.read(buf, sizeof(buf)) || in.gcount() > 0)
        h = fnv64(std::string_view(buf, static_cast<size_t>(in.gcount())), h);
    return h;
}

}  // namespace

// Long query CSV extended with region/nation rows, so enrichment inputs
// survive a round-trip exactly.
void write_query_panel_csv(const QueryPanel& panel, const std::string& path) {
    std::ofstream out(path);
    if (!out) fail(ErrorKind::IoError, "cannot write " + path);
    out << "date,geo,query,value\n";
    std::vector<GeoId> geos;
    geos.push_back(GeoId::nation());
    for (const auto& r : panel.regions().region_codes()) geos.push_back(GeoId::region(r));
    for (const auto& s : panel.regions().state_codes()) geos.push_back(GeoId::state(s));
    for (const auto& geo : geos)
        for (const auto& q : panel.queries()) {
            if (!panel.has_series(geo, q)) continue;
            const auto& series = panel.series(geo, q);
            for (size_t i = 0; i < series.values.size(); ++i)
                out << to_string(series.start + std::chrono::days(static_cast<long>(i))) << ','
                    << geo.code << ',' << q << ',' << format_double(series.values[i]) << '\n';
        }
}

QueryPanel read_query_panel_csv(const std::string& path, const RegionTable& regions) {
    CsvTable csv = read_csv(path);
    size_t dc = csv.col("date"), gc = csv.col("geo"), qc = csv.col("query"),
           vc = csv.col("value");
    Date min_date = Date::max(), max_date = Date::min();
    std::set<std::string> queries;
    for (const auto& row : csv.rows) {
        Date d = parse_date(row[dc]);
        min_date = std::min(min_date, d);
        max_date = std::max(max_date, d);
        queries.insert(row[qc]);
    }

    // Rebuild through the public loader for the state rows, then overwrite
    // region/nation series from the cached values.
    QueryPanel panel;
    {
        fs::path tmp = fs::path(path).parent_path() / (fs::path(path).filename().string() + ".states");
        std::ofstream out(tmp);
        out << "date,geo,query,value\n";
        for (const auto& row : csv.rows)
            if (regions.is_state(row[gc]))
                out << row[dc] << ',' << row[gc] << ',' << row[qc] << ',' << row[vc] << '\n';
        out.close();
        panel = load_query_panel(tmp.string(), regions);
        fs::remove(tmp);
    }
    for (const auto& row : csv.rows) {
        if (regions.is_state(row[gc])) continue;
        GeoId geo = row[gc] == "US" ? GeoId::nation() : GeoId::region(row[gc]);
        panel.series_mut(geo, row[qc]).at(parse_date(row[dc])) = std::stod(row[vc]);
    }
    return panel;
}

namespace {

Date ceil_saturday(Date d) {
    return week_of(d).week_end;
}

Date floor_saturday(Date d) {
    EpiWeek w = week_of(d);
    return w.week_end == d ? d : week_at(w.index - 1).week_end;
}

}  // namespace

LoadedInputs load_inputs(const PipelineConfig& cfg) {
    RegionTable regions = cfg.paths.region_override.empty()
                              ? RegionTable()
                              : RegionTable::load_overrides(cfg.paths.region_override);
    if (!fs::exists(cfg.paths.input_feed))
        fail(ErrorKind::IoError, "input feed not found: " + cfg.paths.input_feed);
    if (!fs::exists(cfg.paths.truth_feed))
        fail(ErrorKind::IoError, "truth feed not found: " + cfg.paths.truth_feed);
    if (!fs::exists(cfg.paths.query_csv))
        fail(ErrorKind::IoError, "query csv not found: " + cfg.paths.query_csv);
    LoadedInputs loaded{regions,
                        load_surveillance(cfg.paths.input_feed, SurveillanceSchema::State,
                                          SourceTag::InputFeed, regions),
                        load_surveillance(cfg.paths.truth_feed, SurveillanceSchema::State,
                                          SourceTag::TruthFeed, regions),
                        load_query_panel(cfg.paths.query_csv, regions)};
    return loaded;
}

QueryPanel preprocess_queries(const QueryPanel& raw, const PipelineConfig& cfg,
                              const std::string& cache_dir) {
    std::uint64_t key = fnv64_file(cfg.paths.query_csv);
    {
        nlohmann::json section = {{"upper_quantile", cfg.preprocess.upper_quantile},
                                  {"lower_quantile", cfg.preprocess.lower_quantile},
                                  {"sigma_mult", cfg.preprocess.sigma_mult},
                                  {"rolling_window_days", cfg.preprocess.rolling_window_days},
                                  {"replacement_window_days",
                                   cfg.preprocess.replacement_window_days}};
        key = fnv64(section.dump(), key);
    }
    char name[64];
    std::snprintf(name, sizeof(name), "queries_%016llx.csv",
                  static_cast<unsigned long long>(key));
    fs::path cache_file = fs::path(cache_dir) / name;
    if (fs::exists(cache_file)) return read_query_panel_csv(cache_file.string(), raw.regions());

    QueryPanel processed = enrich_states(iqr_filter_panel(prune_low_volume(raw), cfg.preprocess));

    std::error_code ec;
    fs::create_directories(cache_dir, ec);
    if (!ec) write_query_panel_csv(processed, cache_file.string());
    return processed;
}

namespace {

struct HistoryKey {
    std::string geo;
    int horizon;
    MethodId method;
    bool operator<(const HistoryKey& o) const {
        return std::tie(geo, horizon, method) < std::tie(o.geo, o.horizon, o.method);
    }
};

struct MethodHistory {
    std::deque<std::pair<int, double>> pending;  // (target week index, point)
    std::vector<double> errors;                  // realized point - actual, oldest first
};

class BacktestDriver {
public:
    BacktestDriver(const PipelineConfig& cfg, const LoadedInputs& inputs,
                   const QueryPanel& processed, const LagTable& lags)
        : cfg_(cfg),
          inputs_(inputs),
          ctx_{inputs.input, processed, lags, cfg.argo},
          states_(inputs.input.state_codes()),
          grouping_(StateGrouping::make(states_, cfg.argox.alone_states,
                                        cfg.argox.excluded_from_constraint)) {
        for (size_t i = 0; i < states_.size(); ++i)
            state_index_[states_[i]] = static_cast<int>(i);
        for (const auto& s : grouping_.joint) joint_idx_.push_back(state_index_.at(s));
        for (const auto& s : grouping_.constrained)
            constrained_idx_.push_back(state_index_.at(s));
    }

    std::vector<Date> plan_anchors() const;
    void run(const std::vector<Date>& anchors, std::ostream* trace);

    std::vector<ForecastRecord> take_records() { return std::move(records_); }

private:
    struct TaskResult {
        GeoId geo;
        FeatureMode mode;
        DailyForecast forecast;
    };

    void process_anchor(Date anchor, std::ostream* trace);
    void realize_pending(int current_week);
    double weekly_input(const std::string& code, int week_index) const {
        return inputs_.input.deaths(GeoId::state(code)).weekly_sum(week_at(week_index));
    }
    void emit(const GeoId& geo, MethodId method, int horizon, Date anchor, double point);

    const PipelineConfig& cfg_;
    const LoadedInputs& inputs_;
    ArgoContext ctx_;
    std::vector<std::string> states_;
    StateGrouping grouping_;
    std::map<std::string, int> state_index_;
    std::vector<int> joint_idx_, constrained_idx_;

    std::map<HistoryKey, MethodHistory> history_;
    std::vector<WeeklyEstimateBundle> bundles_[4];  // per horizon
    std::vector<ForecastRecord> records_;
    // Points emitted at the current anchor, for the ensemble to copy.
    std::map<HistoryKey, const ForecastRecord*> current_;
};

std::vector<Date> BacktestDriver::plan_anchors() const {
    const auto& argo = cfg_.argo;
    int max_case_offset = argo.horizon_days;
    for (int j : argo.case_offsets) max_case_offset = std::max(max_case_offset, j);
    int max_query_lag = argo.horizon_days;
    for (const auto& e : ctx_.lags.entries)
        if (e.selected) max_query_lag = std::max(max_query_lag, e.optimal_lag);

    int deaths_need = argo.training_days + argo.horizon_days - 1 + argo.death_lags;
    int cases_need = argo.training_days - 1 + max_case_offset;
    int queries_need = argo.training_days - 1 + max_query_lag;
    int smoothing_slack = argo.smoothing_window - 1;

    Date earliest = Date::min();
    Date latest = Date::max();
    auto restrict = [&](const DailySeries& s, int need) {
        earliest = std::max(earliest, s.start + std::chrono::days(need + smoothing_slack + 7));
        latest = std::min(latest, s.end());
    };
    for (const auto& code : states_) {
        restrict(inputs_.input.deaths(GeoId::state(code)), deaths_need);
        restrict(inputs_.input.cases(GeoId::state(code)), cases_need);
    }
    restrict(inputs_.input.deaths(GeoId::nation()), deaths_need);
    earliest = std::max(earliest,
                        ctx_.queries.start() + std::chrono::days(queries_need + smoothing_slack));
    latest = std::min(latest, ctx_.queries.end());

    Date first = ceil_saturday(earliest);
    if (cfg_.feature_select.window_end)
        first = std::max(first, ceil_saturday(*cfg_.feature_select.window_end));
    if (cfg_.backtest.first_anchor) first = std::max(first, *cfg_.backtest.first_anchor);
    Date last = floor_saturday(latest);
    if (cfg_.backtest.last_anchor) last = std::min(last, *cfg_.backtest.last_anchor);
    if (first > last)
        fail(ErrorKind::ConfigError, "no feasible forecast anchors between " + to_string(first) +
                                         " and " + to_string(last));
    std::vector<Date> anchors;
    for (Date d = first; d <= last; d += std::chrono::days(7)) anchors.push_back(d);
    return anchors;
}

void BacktestDriver::realize_pending(int current_week) {
    for (auto& [key, hist] : history_) {
        while (!hist.pending.empty() && hist.pending.front().first <= current_week) {
            auto [target, point] = hist.pending.front();
            hist.pending.pop_front();
            double actual = key.geo == "US"
                                ? inputs_.input.deaths(GeoId::nation()).weekly_sum(week_at(target))
                                : weekly_input(key.geo, target);
            hist.errors.push_back(point - actual);
        }
    }
}

void BacktestDriver::emit(const GeoId& geo, MethodId method, int horizon, Date anchor,
                          double point) {
    if (cfg_.clamp_nonneg) point = std::max(0.0, point);
    HistoryKey key{geo.code, horizon, method};
    auto& hist = history_[key];

    ForecastRecord rec;
    rec.geo = geo;
    rec.method = method;
    rec.forecast_date = anchor;
    rec.horizon = horizon;
    rec.point = point;
    auto interval =
        build_interval(point, hist.errors, cfg_.ensemble.window, cfg_.ensemble.min_interval_residuals);
    if (interval) {
        rec.lo95 = cfg_.clamp_nonneg ? std::max(0.0, interval->first) : interval->first;
        rec.hi95 = cfg_.clamp_nonneg ? std::max(0.0, interval->second) : interval->second;
    } else {
        rec.flagged = true;
    }
    records_.push_back(rec);
    current_[key] = &records_.back();
    hist.pending.emplace_back(week_of(anchor).index + horizon, point);
}

void BacktestDriver::process_anchor(Date anchor, std::ostream* trace) {
    const int current_week = week_of(anchor).index;
    realize_pending(current_week);
    current_.clear();

    // Fan out the first-step fits.
    std::vector<std::pair<GeoId, FeatureMode>> tasks;
    for (const auto& s : states_) tasks.emplace_back(GeoId::state(s), FeatureMode::Full);
    for (const auto& s : states_) tasks.emplace_back(GeoId::state(s), FeatureMode::GtOnly);
    std::set<std::string> region_codes;
    for (const auto& s : states_)
        region_codes.insert(inputs_.regions.region_of(GeoId::state(s)).code);
    for (const auto& r : region_codes) tasks.emplace_back(GeoId::region(r), FeatureMode::GtOnly);
    tasks.emplace_back(GeoId::nation(), FeatureMode::Full);

    std::vector<DailyForecast> results(tasks.size());
    parallel_for(static_cast<long>(tasks.size()), cfg_.jobs, [&](long i) {
        results[static_cast<size_t>(i)] = daily_forecast(
            ctx_, tasks[static_cast<size_t>(i)].first, anchor, tasks[static_cast<size_t>(i)].second);
    });

    AnchorForecasts fc;
    fc.anchor = anchor;
    for (size_t i = 0; i < tasks.size(); ++i) {
        const auto& [geo, mode] = tasks[i];
        auto weekly = weekly_aggregate(results[i]);
        if (mode == FeatureMode::GtOnly)
            fc.gt_weekly[geo.code] = weekly;
        else if (geo.level == GeoLevel::Nation)
            fc.nat_weekly = weekly;
        else
            fc.argo_state_weekly[geo.code] = weekly;
    }

    if (trace) {
        for (size_t i = 0; i < tasks.size(); ++i) {
            const auto& [geo, mode] = tasks[i];
            if (mode != FeatureMode::Full) continue;
            if (cfg_.coefficient_trace == "nation" && geo.level != GeoLevel::Nation) continue;
            for (size_t lead = 0; lead < results[i].predictions.size(); ++lead) {
                const auto& p = results[i].predictions[lead];
                *trace << to_string(anchor) << ',' << geo.code << ',' << lead + 1
                       << ",intercept," << format_double(p.intercept) << '\n';
                for (size_t f = 0; f < p.names.size(); ++f)
                    *trace << to_string(anchor) << ',' << geo.code << ',' << lead + 1 << ','
                           << p.names[f] << ',' << format_double(p.coefficients[static_cast<long>(f)])
                           << '\n';
            }
        }
    }

    // Persistence baseline.
    EpiWeek latest_week = week_of(anchor);
    auto naive_nat = persistence_forecast(inputs_.input, GeoId::nation(), latest_week);
    std::map<std::string, std::array<double, 4>> naive_state;
    for (const auto& s : states_)
        naive_state[s] = persistence_forecast(inputs_.input, GeoId::state(s), latest_week);

    for (int h = 1; h <= 4; ++h) {
        const auto hi = static_cast<size_t>(h - 1);
        WeeklyEstimateBundle bundle =
            first_step_estimates(fc, inputs_.input, inputs_.regions, states_, h);

        // Second step, once enough realized (W, Z) pairs exist.
        std::vector<const WeeklyEstimateBundle*> train;
        for (const auto& b : bundles_[hi])
            if (week_of(b.anchor).index + h <= current_week) train.push_back(&b);
        if (static_cast<int>(train.size()) > cfg_.argox.cov_window)
            train.erase(train.begin(),
                        train.end() - cfg_.argox.cov_window);

        std::optional<std::vector<double>> two_step;   // full state vector
        std::optional<std::vector<double>> nat_constr;
        if (static_cast<int>(train.size()) >= cfg_.argox.cov_window) {
            auto realized = [&](const WeeklyEstimateBundle& b, int idx) {
                int target = week_of(b.anchor).index + h;
                return weekly_input(b.states[static_cast<size_t>(idx)], target) - b.y_prev[idx];
            };

            two_step.emplace(states_.size());
            {
                std::vector<std::pair<Eigen::VectorXd, Eigen::VectorXd>> pairs;
                for (const auto* b : train) {
                    Eigen::VectorXd z(static_cast<long>(joint_idx_.size()));
                    for (size_t i = 0; i < joint_idx_.size(); ++i)
                        z[static_cast<long>(i)] = realized(*b, joint_idx_[i]);
                    pairs.emplace_back(std::move(z), stack_predictors(*b, joint_idx_));
                }
                CovStats cov = CovStats::from_pairs(pairs, cfg_.argox.epsilon);
                auto pred = blp_joint(bundle, cov, joint_idx_);
                for (size_t i = 0; i < joint_idx_.size(); ++i)
                    (*two_step)[static_cast<size_t>(joint_idx_[i])] = pred[i];
            }
            for (const auto& code : grouping_.alone) {
                int idx = state_index_.at(code);
                std::vector<std::pair<Eigen::VectorXd, Eigen::VectorXd>> pairs;
                for (const auto* b : train) {
                    Eigen::VectorXd z(1);
                    z[0] = realized(*b, idx);
                    pairs.emplace_back(std::move(z), alone_predictors(*b, idx));
                }
                CovStats cov = CovStats::from_pairs(pairs, cfg_.argox.epsilon);
                (*two_step)[static_cast<size_t>(idx)] = blp_alone(bundle, cov, idx);
            }

            nat_constr.emplace(states_.size());
            {
                std::vector<std::pair<Eigen::VectorXd, Eigen::VectorXd>> pairs;
                for (const auto* b : train) {
                    Eigen::VectorXd z(static_cast<long>(constrained_idx_.size()));
                    for (size_t i = 0; i < constrained_idx_.size(); ++i)
                        z[static_cast<long>(i)] = realized(*b, constrained_idx_[i]);
                    pairs.emplace_back(std::move(z), stack_predictors(*b, constrained_idx_));
                }
                CovStats cov = CovStats::from_pairs(pairs, cfg_.argox.epsilon);
                double target = fc.nat_weekly[hi];
                for (const auto& code : cfg_.argox.excluded_from_constraint)
                    if (state_index_.count(code))
                        target -= fc.argo_state_weekly.at(code)[hi];
                auto pred = blp_nat_constrained(bundle, cov, constrained_idx_, target);
                for (size_t i = 0; i < constrained_idx_.size(); ++i)
                    (*nat_constr)[static_cast<size_t>(constrained_idx_[i])] = pred.y_hat[i];
                for (const auto& code : cfg_.argox.excluded_from_constraint)
                    if (state_index_.count(code))
                        (*nat_constr)[static_cast<size_t>(state_index_.at(code))] =
                            fc.argo_state_weekly.at(code)[hi];
            }
        }

        // Emit constituent and baseline records.
        emit(GeoId::nation(), MethodId::Argo, h, anchor, fc.nat_weekly[hi]);
        emit(GeoId::nation(), MethodId::Naive, h, anchor, naive_nat[hi]);
        for (const auto& s : states_) {
            emit(GeoId::state(s), MethodId::Argo, h, anchor, fc.argo_state_weekly.at(s)[hi]);
            emit(GeoId::state(s), MethodId::Naive, h, anchor, naive_state.at(s)[hi]);
            int idx = state_index_.at(s);
            if (two_step)
                emit(GeoId::state(s), MethodId::Argox2Step, h, anchor,
                     (*two_step)[static_cast<size_t>(idx)]);
            if (nat_constr)
                emit(GeoId::state(s), MethodId::ArgoxNatConstraint, h, anchor,
                     (*nat_constr)[static_cast<size_t>(idx)]);
        }

        // Winner-takes-all ensemble over the three constituents.
        if (two_step && nat_constr) {
            for (const auto& s : states_) {
                auto errors_of = [&](MethodId m) -> const std::vector<double>& {
                    static const std::vector<double> empty;
                    auto it = history_.find({s, h, m});
                    return it == history_.end() ? empty : it->second.errors;
                };
                WinnerResult winner;
                if (cfg_.ensemble.pooled) {
                    std::vector<double> pooled[3];
                    bool enough = true;
                    for (int m = 0; m < 3; ++m) {
                        for (int hh = 1; hh <= 4; ++hh) {
                            auto it = history_.find({s, hh, kConstituents[m]});
                            const auto& e = it == history_.end() ? std::vector<double>{}
                                                                 : it->second.errors;
                            if (static_cast<int>(e.size()) < cfg_.ensemble.window) enough = false;
                            long take = std::min<long>(cfg_.ensemble.window,
                                                       static_cast<long>(e.size()));
                            pooled[m].insert(pooled[m].end(), e.end() - take, e.end());
                        }
                    }
                    winner = enough ? select_winner(pooled[0], pooled[1], pooled[2],
                                                    cfg_.ensemble.window * 4)
                                    : WinnerResult{MethodId::Argo, true};
                } else {
                    winner = select_winner(errors_of(MethodId::Argo),
                                           errors_of(MethodId::Argox2Step),
                                           errors_of(MethodId::ArgoxNatConstraint),
                                           cfg_.ensemble.window);
                }
                const ForecastRecord* chosen = current_.at({s, h, winner.method});
                ForecastRecord rec = *chosen;
                rec.method = MethodId::Ensemble;
                rec.selected_method = winner.method;
                rec.flagged = winner.fallback || !rec.lo95;
                records_.push_back(rec);
            }
        }

        bundles_[hi].push_back(std::move(bundle));
    }
}

void BacktestDriver::run(const std::vector<Date>& anchors, std::ostream* trace) {
    for (Date anchor : anchors) process_anchor(anchor, trace);
    std::sort(records_.begin(), records_.end(),
              [](const ForecastRecord& a, const ForecastRecord& b) {
                  auto ka = std::tie(a.forecast_date, a.geo.code, a.horizon);
                  auto kb = std::tie(b.forecast_date, b.geo.code, b.horizon);
                  if (ka != kb) return ka < kb;
                  return std::string(to_string(a.method)) < to_string(b.method);
              });
}

LagTable select_features(const PipelineConfig& cfg, const LoadedInputs& inputs,
                         const QueryPanel& processed) {
    Date start = cfg.feature_select.window_start.value_or(make_date(2020, 4, 1));
    Date end = cfg.feature_select.window_end.value_or(make_date(2020, 6, 30));
    return score_and_select(inputs.input.deaths(GeoId::nation()), processed, start, end,
                            cfg.feature_select.threshold, cfg.feature_select.lag_range);
}

void write_run_metadata(const PipelineConfig& cfg, const LagTable& lags,
                        const std::vector<Date>& anchors, const std::string& path) {
    nlohmann::json j = nlohmann::json::parse(cfg.to_json());
    nlohmann::json meta;
    meta["config"] = j;
    meta["lag_table"] = {{"n_queries", lags.entries.size()},
                         {"n_selected", lags.selected_queries().size()},
                         {"window_start", to_string(lags.window_start)},
                         {"window_end", to_string(lags.window_end)}};
    meta["anchors"] = {{"first", anchors.empty() ? "" : to_string(anchors.front())},
                       {"last", anchors.empty() ? "" : to_string(anchors.back())},
                       {"count", anchors.size()}};
    meta["argox_epsilon"] = cfg.argox.epsilon;
    std::ofstream out(path);
    if (!out) fail(ErrorKind::IoError, "cannot write " + path);
    out << meta.dump(2) << "\n";
}

}  // namespace

std::vector<ForecastRecord> run_forecast_stage(const PipelineConfig& cfg) {
    cfg.validate();
    LoadedInputs inputs = load_inputs(cfg);
    fs::path out_dir(cfg.paths.out_dir);
    std::error_code ec;
    fs::create_directories(out_dir, ec);

    QueryPanel processed =
        preprocess_queries(inputs.queries, cfg, (out_dir / "cache").string());
    LagTable lags = select_features(cfg, inputs, processed);
    write_lag_table_csv(lags, (out_dir / "lag_table.csv").string());

    BacktestDriver driver(cfg, inputs, processed, lags);
    std::vector<Date> anchors = driver.plan_anchors();

    std::ofstream trace;
    if (cfg.coefficient_trace != "none") {
        trace.open(out_dir / "argo_coefficients.csv");
        if (!trace) fail(ErrorKind::IoError, "cannot write coefficient trace");
        trace << "anchor_date,geo,horizon_days,feature,coefficient\n";
    }
    driver.run(anchors, cfg.coefficient_trace != "none" ? &trace : nullptr);

    auto records = driver.take_records();
    write_forecasts_csv(records, (out_dir / "forecasts.csv").string());
    write_run_metadata(cfg, lags, anchors, (out_dir / "run_metadata.json").string());
    return records;
}

ScoreTable run_evaluate_stage(const PipelineConfig& cfg, const std::string& forecasts_csv) {
    RegionTable regions = cfg.paths.region_override.empty()
                              ? RegionTable()
                              : RegionTable::load_overrides(cfg.paths.region_override);
    if (!fs::exists(cfg.paths.truth_feed))
        fail(ErrorKind::IoError, "truth feed not found: " + cfg.paths.truth_feed);
    SurveillancePanel truth = load_surveillance(cfg.paths.truth_feed, SurveillanceSchema::State,
                                                SourceTag::TruthFeed, regions);
    std::vector<ForecastRecord> records = read_forecasts_csv(forecasts_csv);
    if (records.empty()) fail(ErrorKind::EmptyEvaluation, forecasts_csv + " is empty");

    TruthFn truth_fn = [&truth](const GeoId& geo, Date week_end) -> std::optional<double> {
        if (!truth.has(geo)) return std::nullopt;
        const DailySeries& deaths = truth.deaths(geo);
        EpiWeek w = week_of(week_end);
        if (!deaths.covers(w.week_start()) || !deaths.covers(w.week_end)) return std::nullopt;
        return deaths.weekly_sum(w);
    };

    ScoreTable scores = score(records, truth_fn, Date::min(), Date::max());
    emit_reports(scores, records, cfg.paths.out_dir);
    return scores;
}

BacktestResult run_backtest(const PipelineConfig& cfg) {
    BacktestResult result;
    result.forecasts = run_forecast_stage(cfg);
    fs::path out_dir(cfg.paths.out_dir);
    result.scores = run_evaluate_stage(cfg, (out_dir / "forecasts.csv").string());
    result.lags = read_lag_table_csv((out_dir / "lag_table.csv").string());
    return result;
}

}  // namespace argox
