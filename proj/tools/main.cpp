#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "argox/csv.hpp"
#include "argox/errors.hpp"
#include "argox/pipeline.hpp"

namespace fs = std::filesystem;
using namespace argox;

namespace {

struct GlobalOpts {
    std::string config_path;
    std::string out_dir;
    int jobs = 0;
    std::uint64_t seed = 42;
    bool clamp = false;
};

PipelineConfig load_config(const GlobalOpts& g, const char* stage) {
    if (g.config_path.empty())
        fail(ErrorKind::ConfigError, std::string(stage) + ": --config is required");
    PipelineConfig cfg = PipelineConfig::from_json_file(g.config_path);
    if (!g.out_dir.empty()) cfg.paths.out_dir = g.out_dir;
    if (g.jobs > 0) cfg.jobs = g.jobs;
    if (g.clamp) cfg.clamp_nonneg = true;
    return cfg;
}

// Stage wrapper: tag errors, remove this run's partial outputs, map the
// failure to an exit code (2 for missing files / bad config, 1 otherwise).
int run_stage(const char* stage, const std::vector<std::string>& outputs,
              const std::function<void()>& body) {
    try {
        body();
        return 0;
    } catch (const Error& e) {
        std::cerr << "[" << stage << "] " << e.what() << "\n";
        for (const auto& path : outputs) {
            std::error_code ec;
            fs::remove(path, ec);
        }
        return e.kind() == ErrorKind::IoError || e.kind() == ErrorKind::ConfigError ? 2 : 1;
    } catch (const std::exception& e) {
        std::cerr << "[" << stage << "] " << e.what() << "\n";
        return 1;
    }
}

std::vector<std::string> forecast_outputs(const PipelineConfig& cfg) {
    fs::path out(cfg.paths.out_dir);
    return {(out / "forecasts.csv").string(), (out / "lag_table.csv").string(),
            (out / "argo_coefficients.csv").string(), (out / "run_metadata.json").string()};
}

std::vector<std::string> report_outputs(const PipelineConfig& cfg) {
    fs::path out(cfg.paths.out_dir);
    return {(out / "forecasts.csv").string(),          (out / "scores_by_state.csv").string(),
            (out / "scores_summary.csv").string(),     (out / "ensemble_selection.csv").string(),
            (out / "coverage.csv").string()};
}

void print_scores_summary(const std::string& out_dir) {
    fs::path summary = fs::path(out_dir) / "scores_summary.csv";
    if (!fs::exists(summary)) return;
    std::ifstream in(summary);
    std::string line;
    while (std::getline(in, line)) std::cout << "  " << line << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multi-horizon epidemic death forecasting from lagged surveillance counts and "
                 "search-frequency panels"};
    app.require_subcommand(1);
    app.fallthrough();

    GlobalOpts g;
    app.add_option("--config", g.config_path, "pipeline config JSON");
    app.add_option("--out", g.out_dir, "output directory (overrides config)");
    app.add_option("--jobs", g.jobs, "worker threads (overrides config)");
    app.add_option("--seed", g.seed, "seed for the synth subcommand");
    app.add_flag("--clamp-nonneg", g.clamp, "clamp emitted forecasts at zero");

    auto* synth_cmd = app.add_subcommand("synth", "generate a synthetic world");
    SynthConfig synth_cfg;
    std::string synth_dir = "data";
    synth_cmd->add_option("--dir", synth_dir, "where to write input/truth/query CSVs");
    synth_cmd->add_option("--states", synth_cfg.n_states, "number of states");
    synth_cmd->add_option("--queries", synth_cfg.n_queries, "number of search queries");
    synth_cmd->add_option("--weeks", synth_cfg.span_weeks, "world length in weeks");
    synth_cmd->add_option("--snr", synth_cfg.snr, "signal-to-noise ratio");
    synth_cmd->add_option("--spike-rate", synth_cfg.spike_rate, "spike injection rate");
    synth_cmd->add_option("--noise-fraction", synth_cfg.noise_query_fraction,
                          "fraction of pure-noise queries");
    synth_cmd->add_option("--mix", synth_cfg.spatial_mix, "regional mixing weight");

    auto* check_cmd = app.add_subcommand("ingest-check", "validate the configured inputs");
    auto* preprocess_cmd =
        app.add_subcommand("preprocess", "prune, filter and enrich the query panel");
    auto* select_cmd =
        app.add_subcommand("select-features", "compute optimal lags and the selected queries");
    auto* forecast_cmd = app.add_subcommand("forecast", "run the rolling backtest");
    auto* evaluate_cmd =
        app.add_subcommand("evaluate", "score forecasts against the truth feed and emit reports");
    std::string forecasts_path;
    evaluate_cmd->add_option("--forecasts", forecasts_path,
                             "forecast CSV to score (default <out>/forecasts.csv)");
    auto* report_cmd = app.add_subcommand("report", "print the report files of a finished run");

    CLI11_PARSE(app, argc, argv);

    if (synth_cmd->parsed()) {
        return run_stage("synth", {}, [&] {
            synth_cfg.seed = g.seed;
            RegionTable regions;
            SynthData data = generate(synth_cfg, regions);
            SynthPaths paths = write_synth_csvs(data, synth_dir);
            std::string out_dir = g.out_dir.empty() ? (fs::path(synth_dir) / "out").string()
                                                    : g.out_dir;
            PipelineConfig cfg = synth_default_config(synth_cfg, paths, out_dir);
            if (g.jobs > 0) cfg.jobs = g.jobs;
            cfg.clamp_nonneg = g.clamp;
            std::string cfg_path = (fs::path(synth_dir) / "config.json").string();
            std::ofstream out(cfg_path);
            out << cfg.to_json();
            std::cout << "synthetic world (seed " << synth_cfg.seed << ", "
                      << synth_cfg.n_states << " states, " << synth_cfg.span_weeks
                      << " weeks) written under " << synth_dir << "\n"
                      << "config: " << cfg_path << "\n";
        });
    }

    if (check_cmd->parsed()) {
        return run_stage("ingest", {}, [&] {
            PipelineConfig cfg = load_config(g, "ingest-check");
            LoadedInputs inputs = load_inputs(cfg);
            auto states = inputs.input.state_codes();
            const auto& nat = inputs.input.deaths(GeoId::nation());
            std::cout << "input feed: " << states.size() << " states, "
                      << to_string(nat.start) << " .. " << to_string(nat.end()) << "\n"
                      << "truth feed: " << inputs.truth.state_codes().size() << " states\n"
                      << "query panel: " << inputs.queries.queries().size() << " queries, "
                      << to_string(inputs.queries.start()) << " .. "
                      << to_string(inputs.queries.end()) << "\n";
        });
    }

    if (preprocess_cmd->parsed()) {
        PipelineConfig cfg;
        int rc = run_stage("preprocess", {}, [&] { cfg = load_config(g, "preprocess"); });
        if (rc != 0) return rc;
        fs::path out(cfg.paths.out_dir);
        return run_stage("preprocess", {(out / "processed_queries.csv").string()}, [&] {
            LoadedInputs inputs = load_inputs(cfg);
            QueryPanel processed =
                preprocess_queries(inputs.queries, cfg, (out / "cache").string());
            fs::create_directories(out);
            write_query_panel_csv(processed, (out / "processed_queries.csv").string());
            std::cout << "kept " << processed.queries().size() << " of "
                      << inputs.queries.queries().size() << " queries -> "
                      << (out / "processed_queries.csv").string() << "\n";
        });
    }

    if (select_cmd->parsed()) {
        PipelineConfig cfg;
        int rc = run_stage("select-features", {}, [&] { cfg = load_config(g, "select-features"); });
        if (rc != 0) return rc;
        fs::path out(cfg.paths.out_dir);
        return run_stage("select-features", {(out / "lag_table.csv").string()}, [&] {
            LoadedInputs inputs = load_inputs(cfg);
            QueryPanel processed =
                preprocess_queries(inputs.queries, cfg, (out / "cache").string());
            Date start = cfg.feature_select.window_start.value_or(make_date(2020, 4, 1));
            Date end = cfg.feature_select.window_end.value_or(make_date(2020, 6, 30));
            LagTable lags = score_and_select(inputs.input.deaths(GeoId::nation()), processed,
                                             start, end, cfg.feature_select.threshold,
                                             cfg.feature_select.lag_range);
            fs::create_directories(out);
            write_lag_table_csv(lags, (out / "lag_table.csv").string());
            std::cout << "selected " << lags.selected_queries().size() << " of "
                      << lags.entries.size() << " queries -> " << (out / "lag_table.csv").string()
                      << "\n";
        });
    }

    if (forecast_cmd->parsed()) {
        PipelineConfig cfg;
        int rc = run_stage("forecast", {}, [&] { cfg = load_config(g, "forecast"); });
        if (rc != 0) return rc;
        return run_stage("forecast", forecast_outputs(cfg), [&] {
            auto records = run_forecast_stage(cfg);
            std::cout << records.size() << " forecast records -> " << cfg.paths.out_dir
                      << "/forecasts.csv\n";
        });
    }

    if (evaluate_cmd->parsed()) {
        PipelineConfig cfg;
        int rc = run_stage("evaluate", {}, [&] { cfg = load_config(g, "evaluate"); });
        if (rc != 0) return rc;
        std::string path = forecasts_path.empty()
                               ? (fs::path(cfg.paths.out_dir) / "forecasts.csv").string()
                               : forecasts_path;
        return run_stage("evaluate", report_outputs(cfg), [&] {
            if (!fs::exists(path)) fail(ErrorKind::IoError, "forecasts not found: " + path);
            ScoreTable scores = run_evaluate_stage(cfg, path);
            std::cout << scores.rows.size() << " score rows -> " << cfg.paths.out_dir << "\n";
        });
    }

    if (report_cmd->parsed()) {
        PipelineConfig cfg;
        int rc = run_stage("report", {}, [&] { cfg = load_config(g, "report"); });
        if (rc != 0) return rc;
        return run_stage("report", {}, [&] {
            fs::path out(cfg.paths.out_dir);
            if (!fs::exists(out / "scores_summary.csv"))
                fail(ErrorKind::IoError,
                     "no reports under " + out.string() + "; run evaluate first");
            std::cout << "scores_summary (" << (out / "scores_summary.csv").string() << "):\n";
            print_scores_summary(out.string());
            std::cout << "ensemble selection shares ("
                      << (out / "ensemble_selection.csv").string() << "):\n";
            std::ifstream in(out / "ensemble_selection.csv");
            std::string line;
            while (std::getline(in, line)) std::cout << "  " << line << "\n";
        });
    }

    return 0;
}
