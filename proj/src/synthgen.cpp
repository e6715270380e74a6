#include "argox/synthgen.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <set>

#include "argox/errors.hpp"

namespace argox {

namespace {

// Deterministic across platforms: splitmix64 streams keyed by (seed, tag),
// normals via Box-Muller.
struct Rng {
    std::uint64_t state;

    explicit Rng(std::uint64_t seed, std::uint64_t tag) : state(seed ^ (tag * 0x9E3779B97F4A7C15ULL)) {
        next();
        next();
    }

    std::uint64_t next() {
        std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    double uniform() {  // (0, 1)
        return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53;
    }

    double normal() {
        double u1 = uniform(), u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    int uniform_int(int lo, int hi) {  // inclusive
        return lo + static_cast<int>(next() % static_cast<std::uint64_t>(hi - lo + 1));
    }
};

std::uint64_t tag_of(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

// Smooth positive wave: sinusoid mix (periods two weeks to four months)
// over a baseline, normalized to mean about 1.
std::vector<double> smooth_wave(Rng& rng, int n) {
    constexpr int kComponents = 4;
    double period[kComponents], phase[kComponents], amp[kComponents];
    for (int k = 0; k < kComponents; ++k) {
        period[k] = 14.0 + rng.uniform() * 110.0;  // days
        phase[k] = rng.uniform() * 2.0 * std::numbers::pi;
        amp[k] = 0.4 + 0.6 * rng.uniform();
    }
    std::vector<double> wave(static_cast<size_t>(n));
    for (int t = 0; t < n; ++t) {
        double v = 1.0;
        for (int k = 0; k < kComponents; ++k)
            v += amp[k] * std::sin(2.0 * std::numbers::pi * t / period[k] + phase[k]) /
                 kComponents;
        wave[static_cast<size_t>(t)] = std::max(0.08, v);
    }
    return wave;
}

const double kDeathWeekdayFactor[7] = {0.78, 1.10, 1.14, 1.09, 1.05, 1.00, 0.84};  // Sun..Sat
const double kCaseWeekdayFactor[7] = {0.70, 1.18, 1.12, 1.08, 1.04, 1.02, 0.86};

std::vector<long long> to_cumulative(const std::vector<double>& increments) {
    std::vector<long long> cum;
    cum.reserve(increments.size());
    double run = 0.0;
    for (double v : increments) {
        run += v;
        cum.push_back(std::llround(run));
    }
    return cum;
}

}  // namespace

void SynthConfig::validate() const {
    if (n_states < 1 || n_states > 51) fail(ErrorKind::ConfigError, "n_states must be in 1..51");
    if (n_queries < 2) fail(ErrorKind::ConfigError, "n_queries must be >= 2");
    if (lag_min < 1 || lag_min > lag_max) fail(ErrorKind::ConfigError, "bad planted lag range");
    if (snr <= 0.0) fail(ErrorKind::ConfigError, "snr must be positive");
    if (spatial_mix < 0.0 || spatial_mix > 1.0)
        fail(ErrorKind::ConfigError, "spatial_mix must be in [0,1]");
    if (span_weeks < 12) fail(ErrorKind::ConfigError, "span_weeks must be >= 12");
    if (spike_rate < 0.0 || spike_rate >= 1.0)
        fail(ErrorKind::ConfigError, "spike_rate must be in [0,1)");
    if (noise_query_fraction < 0.0 || noise_query_fraction >= 1.0)
        fail(ErrorKind::ConfigError, "noise_query_fraction must be in [0,1)");
    if (std::chrono::weekday(start) != std::chrono::Sunday)
        fail(ErrorKind::ConfigError, "start must be a Sunday");
}

SynthData generate(const SynthConfig& cfg, const RegionTable& regions) {
    cfg.validate();

    SynthData data;
    data.cfg = cfg;
    data.start = cfg.start;
    data.n_days = cfg.span_weeks * 7;
    const int n_ext = data.n_days + cfg.lag_max + 7;  // queries read the wave ahead

    const auto& all_states = regions.state_codes();
    data.states.assign(all_states.begin(), all_states.begin() + cfg.n_states);

    // Regional waves, then per-state blends.
    std::map<std::string, std::vector<double>> region_wave;
    std::map<std::string, std::vector<double>> state_latent;
    std::map<std::string, double> state_level;
    for (const auto& s : data.states) {
        std::string region = regions.region_of(GeoId::state(s)).code;
        if (!region_wave.count(region)) {
            Rng rng(cfg.seed, tag_of("region:" + region));
            region_wave[region] = smooth_wave(rng, n_ext);
        }
        Rng rng(cfg.seed, tag_of("state:" + s));
        std::vector<double> own = smooth_wave(rng, n_ext);
        const auto& rw = region_wave[region];
        std::vector<double> latent(static_cast<size_t>(n_ext));
        for (int t = 0; t < n_ext; ++t)
            latent[static_cast<size_t>(t)] =
                cfg.spatial_mix * rw[static_cast<size_t>(t)] +
                (1.0 - cfg.spatial_mix) * own[static_cast<size_t>(t)];
        state_latent[s] = std::move(latent);
        state_level[s] = 8.0 + 60.0 * rng.uniform();  // deaths per day scale
    }

    // Surveillance: deaths follow the latent directly, cases lead by two
    // weeks at a higher level. Noise is multiplicative so variance grows
    // with the signal.
    for (const auto& s : data.states) {
        const auto& latent = state_latent[s];
        double level = state_level[s];
        Rng noise(cfg.seed, tag_of("surv:" + s));
        Rng revision(cfg.seed, tag_of("rev:" + s));
        std::vector<double> deaths(static_cast<size_t>(data.n_days));
        std::vector<double> cases(static_cast<size_t>(data.n_days));
        std::vector<double> deaths_truth(static_cast<size_t>(data.n_days));
        std::vector<double> cases_truth(static_cast<size_t>(data.n_days));
        for (int t = 0; t < data.n_days; ++t) {
            int wd = static_cast<int>(
                std::chrono::weekday(data.start + std::chrono::days(t)).c_encoding());
            double d = level * latent[static_cast<size_t>(t)] * kDeathWeekdayFactor[wd] *
                       (1.0 + noise.normal() / cfg.snr);
            double c = 25.0 * level * latent[static_cast<size_t>(std::min(t + 14, n_ext - 1))] *
                       kCaseWeekdayFactor[wd] * (1.0 + noise.normal() / cfg.snr);
            deaths[static_cast<size_t>(t)] = d;
            cases[static_cast<size_t>(t)] = c;
            double rd = 1.0 + cfg.revision_noise * (2.0 * revision.uniform() - 1.0);
            double rc = 1.0 + cfg.revision_noise * (2.0 * revision.uniform() - 1.0);
            deaths_truth[static_cast<size_t>(t)] = d * rd;
            cases_truth[static_cast<size_t>(t)] = c * rc;
        }
        data.cum_deaths_input[s] = to_cumulative(deaths);
        data.cum_cases_input[s] = to_cumulative(cases);
        data.cum_deaths_truth[s] = to_cumulative(deaths_truth);
        data.cum_cases_truth[s] = to_cumulative(cases_truth);
    }

    // Queries: the leading signal block mirrors the state latent shifted
    // forward by the planted lag; the rest is autocorrelated noise.
    int n_signal = cfg.n_queries - static_cast<int>(std::floor(
                                       cfg.noise_query_fraction * cfg.n_queries));
    for (int k = 0; k < cfg.n_queries; ++k) {
        bool signal = k < n_signal;
        char name[32];
        std::snprintf(name, sizeof(name), "%s%03d", signal ? "topic" : "chatter", k);
        data.queries.push_back(name);
        Rng lag_rng(cfg.seed, tag_of(std::string("lag:") + name));
        int lag = lag_rng.uniform_int(cfg.lag_min, cfg.lag_max);
        if (signal) data.planted_lag[name] = lag;
        double scale = 25.0 + 50.0 * lag_rng.uniform();

        for (const auto& s : data.states) {
            Rng rng(cfg.seed, tag_of(std::string("query:") + name + ":" + s));
            const auto& latent = state_latent[s];
            std::vector<double> v(static_cast<size_t>(data.n_days));
            double ar = 0.0;
            for (int t = 0; t < data.n_days; ++t) {
                double x;
                if (signal) {
                    x = scale * latent[static_cast<size_t>(t + lag)] *
                        (1.0 + rng.normal() / cfg.snr);
                } else {
                    ar = 0.6 * ar + rng.normal();
                    x = scale * 0.5 * (1.0 + 0.3 * ar);
                }
                if (cfg.spike_rate > 0.0 && rng.uniform() < cfg.spike_rate)
                    x *= 8.0 + 10.0 * rng.uniform();
                v[static_cast<size_t>(t)] = std::max(0.0, x);
            }
            data.query_values[{s, name}] = std::move(v);
        }
    }
    return data;
}

SynthPaths write_synth_csvs(const SynthData& data, const std::string& dir) {
    std::filesystem::path base(dir);
    std::error_code ec;
    std::filesystem::create_directories(base, ec);

    SynthPaths paths{(base / "input.csv").string(), (base / "truth.csv").string(),
                     (base / "queries.csv").string()};

    auto write_surveillance = [&](const std::string& path,
                                  const std::map<std::string, std::vector<long long>>& deaths,
                                  const std::map<std::string, std::vector<long long>>& cases) {
        std::ofstream out(path);
        if (!out) fail(ErrorKind::IoError, "cannot write " + path);
        out << "date,state,cases,deaths\n";
        for (int t = 0; t < data.n_days; ++t) {
            std::string date = to_string(data.start + std::chrono::days(t));
            for (const auto& s : data.states)
                out << date << ',' << s << ',' << cases.at(s)[static_cast<size_t>(t)] << ','
                    << deaths.at(s)[static_cast<size_t>(t)] << '\n';
        }
    };
    write_surveillance(paths.input_csv, data.cum_deaths_input, data.cum_cases_input);
    write_surveillance(paths.truth_csv, data.cum_deaths_truth, data.cum_cases_truth);

    std::ofstream out(paths.query_csv);
    if (!out) fail(ErrorKind::IoError, "cannot write " + paths.query_csv);
    out << "date,geo,query,value\n";
    char buf[32];
    for (int t = 0; t < data.n_days; ++t) {
        std::string date = to_string(data.start + std::chrono::days(t));
        for (const auto& s : data.states)
            for (const auto& q : data.queries) {
                double v = data.query_values.at({s, q})[static_cast<size_t>(t)];
                std::snprintf(buf, sizeof(buf), "%.4f", v);
                out << date << ',' << s << ',' << q << ',' << buf << '\n';
            }
    }
    return paths;
}

}  // namespace argox
