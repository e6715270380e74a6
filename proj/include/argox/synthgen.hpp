#pragma once

#include <cstdint>
#include <map>

#include "argox/calendar.hpp"
#include "argox/geo.hpp"

namespace argox {

/// Synthetic world with planted search-leads-deaths structure. Fully
/// determined by the seed: regional epidemic waves drive state deaths;
/// signal queries mirror the waves shifted forward by a planted lag;
/// noise queries carry no signal and exist to be rejected downstream.
struct SynthConfig {
    std::uint64_t seed = 42;
    int n_states = 51;
    int n_queries = 40;
    int lag_min = 4;
    int lag_max = 35;
    double snr = 6.0;              // signal std over noise std
    double spatial_mix = 0.6;      // weight of the regional wave in each state
    int span_weeks = 80;
    double spike_rate = 0.002;     // per (state, query, day) injection odds
    double noise_query_fraction = 0.3;
    double revision_noise = 0.02;  // truth feed multiplicative perturbation
    Date start = make_date(2020, 1, 5);  // a Sunday: weeks align Sun..Sat

    void validate() const;
};

struct SynthData {
    SynthConfig cfg;
    std::vector<std::string> states;
    std::vector<std::string> queries;
    std::map<std::string, int> planted_lag;  // signal queries only
    Date start{};
    int n_days = 0;

    // Cumulative integer counts per state, CSV-ready.
    std::map<std::string, std::vector<long long>> cum_deaths_input, cum_cases_input;
    std::map<std::string, std::vector<long long>> cum_deaths_truth, cum_cases_truth;
    // Daily query frequencies per (state, query).
    std::map<std::pair<std::string, std::string>, std::vector<double>> query_values;
};

SynthData generate(const SynthConfig& cfg, const RegionTable& regions);

struct SynthPaths {
    std::string input_csv, truth_csv, query_csv;
};

/// Write input.csv / truth.csv / queries.csv in the ingestion schemas.
SynthPaths write_synth_csvs(const SynthData& data, const std::string& dir);

}  // namespace argox
