#include "argox/feature_select.hpp"

#include <filesystem>
#include <fstream>
#include <set>

#include "../common/oracles.hpp"
#include "argox/errors.hpp"
#include "doctest.h"

using namespace argox;
namespace fs = std::filesystem;

namespace {

DailySeries series_of(std::vector<double> v, const char* var = "deaths",
                      const char* date = "2020-01-01") {
    return {GeoId::nation(), var, parse_date(date), std::move(v)};
}

// Window placed far enough in that every lag in [4, 35] stays covered.
const Date kWindowStart = parse_date("2020-02-15");
const Date kWindowEnd = parse_date("2020-05-15");

}  // namespace

TEST_CASE("exact lead-lag relation is recovered with zero error") {
    oracle::Rng rng(21);
    const int days = 200;
    std::vector<double> x(days);
    for (auto& v : x) v = 10.0 + 5.0 * rng.normal();
    std::vector<double> y(days, 0.0);
    for (int t = 10; t < days; ++t)
        y[static_cast<size_t>(t)] = 2.0 * x[static_cast<size_t>(t - 10)] + 1.0;

    auto res = optimal_lag(series_of(y), series_of(x, "query:q"), kWindowStart, kWindowEnd,
                           {4, 35});
    CHECK(res.lag == 10);
    CHECK(res.mse == doctest::Approx(0.0).epsilon(1e-12));
    CHECK_FALSE(res.degenerate);
}

TEST_CASE("constant regressor is flagged degenerate with variance mse") {
    oracle::Rng rng(22);
    const int days = 200;
    std::vector<double> y(days);
    for (auto& v : y) v = 5.0 + rng.normal();
    auto deaths = series_of(y);
    auto res = optimal_lag(deaths, series_of(std::vector<double>(days, 3.0), "query:q"),
                           kWindowStart, kWindowEnd, {4, 35});
    CHECK(res.degenerate);
    CHECK(res.lag == 4);

    auto win = deaths.slice(kWindowStart, kWindowEnd);
    double mean = 0;
    for (double v : win) mean += v;
    mean /= static_cast<double>(win.size());
    double var = 0;
    for (double v : win) var += (v - mean) * (v - mean);
    var /= static_cast<double>(win.size());
    CHECK(res.mse == doctest::Approx(var).epsilon(1e-12));
}

TEST_CASE("noisy lag recovery over repeated draws") {
    // Smaller sibling of the acceptance criterion: 25 seeds, lag 7,
    // noise at a tenth of the regressor spread.
    int hits = 0;
    for (int seed = 0; seed < 25; ++seed) {
        oracle::Rng rng(500 + static_cast<std::uint64_t>(seed));
        const int days = 200;
        std::vector<double> x(days), y(days, 0.0);
        for (auto& v : x) v = 10.0 + 3.0 * rng.normal();
        for (int t = 7; t < days; ++t)
            y[static_cast<size_t>(t)] = x[static_cast<size_t>(t - 7)] + 0.3 * rng.normal();
        auto res = optimal_lag(series_of(y), series_of(x, "query:q"), kWindowStart, kWindowEnd,
                               {4, 35});
        if (res.lag == 7) ++hits;
    }
    CHECK(hits >= 24);
}

TEST_CASE("optimal lag is invariant to affine regressor rescaling") {
    oracle::Rng rng(23);
    const int days = 220;
    std::vector<double> x(days), y(days, 0.0);
    for (auto& v : x) v = 5.0 + 2.0 * rng.normal();
    for (int t = 20; t < days; ++t)
        y[static_cast<size_t>(t)] = 3.0 * x[static_cast<size_t>(t - 17)] + rng.normal();
    std::vector<double> scaled(days);
    for (int t = 0; t < days; ++t)
        scaled[static_cast<size_t>(t)] = -4.5 * x[static_cast<size_t>(t)] + 11.0;

    auto res1 = optimal_lag(series_of(y), series_of(x, "query:q"), kWindowStart, kWindowEnd,
                            {4, 35});
    auto res2 = optimal_lag(series_of(y), series_of(scaled, "query:q"), kWindowStart, kWindowEnd,
                            {4, 35});
    CHECK(res1.lag == res2.lag);
    CHECK(res1.mse == doctest::Approx(res2.mse).epsilon(1e-9));
}

TEST_CASE("singleton lag range returns that lag") {
    oracle::Rng rng(24);
    const int days = 150;
    std::vector<double> x(days), y(days);
    for (auto& v : x) v = rng.normal();
    for (auto& v : y) v = rng.normal();
    auto res = optimal_lag(series_of(y), series_of(x, "query:q"), kWindowStart, kWindowEnd,
                           {12, 12});
    CHECK(res.lag == 12);
}

TEST_CASE("insufficient history and tiny windows are rejected") {
    auto deaths = series_of(std::vector<double>(40, 1.0));
    auto query = series_of(std::vector<double>(40, 1.0), "query:q");
    CHECK_THROWS_AS(
        optimal_lag(deaths, query, parse_date("2020-01-20"), parse_date("2020-02-05"), {4, 35}),
        Error);
    CHECK_THROWS_AS(
        optimal_lag(deaths, query, parse_date("2020-02-01"), parse_date("2020-02-02"), {4, 35}),
        Error);
}

TEST_CASE("score_and_select scores, thresholds, sorts and round-trips") {
    oracle::Rng rng(25);
    const int days = 200;
    Date start = parse_date("2020-01-01");

    std::vector<double> latent(days);
    for (auto& v : latent) v = 20.0 + 6.0 * rng.normal();
    std::vector<double> y(days, 0.0);
    for (int t = 0; t < days; ++t)
        y[static_cast<size_t>(t)] = t >= 9 ? latent[static_cast<size_t>(t - 9)] : latent[0];

    std::string csv = "date,geo,query,value\n";
    for (int t = 0; t < days; ++t) {
        std::string date = to_string(start + std::chrono::days(t));
        double leader = latent[static_cast<size_t>(t)];
        csv += date + ",CA,leader," + std::to_string(std::max(0.0, leader)) + "\n";
        csv += date + ",CA,junk," + std::to_string(std::max(0.0, 10.0 + 8.0 * rng.normal())) +
               "\n";
    }
    fs::path path = fs::temp_directory_path() / "select_panel.csv";
    std::ofstream(path) << csv;
    RegionTable regions;
    QueryPanel panel = load_query_panel(path.string(), regions);
    fs::remove(path);

    DailySeries deaths{GeoId::nation(), "deaths", start, y};
    LagTable table = score_and_select(deaths, panel, kWindowStart, kWindowEnd, 0.5, {4, 35});
    REQUIRE(table.entries.size() == 2);
    CHECK(table.entries[0].query == "leader");  // sorted by descending r
    CHECK(table.entries[0].selected);
    CHECK(table.entries[0].optimal_lag == 9);
    CHECK(table.entries[0].pearson_r > 0.9);
    CHECK_FALSE(table.entries[1].selected);

    fs::path out = fs::temp_directory_path() / "lag_table.csv";
    write_lag_table_csv(table, out.string());
    LagTable back = read_lag_table_csv(out.string());
    fs::remove(out);
    REQUIRE(back.entries.size() == table.entries.size());
    for (size_t i = 0; i < back.entries.size(); ++i) {
        CHECK(back.entries[i].query == table.entries[i].query);
        CHECK(back.entries[i].optimal_lag == table.entries[i].optimal_lag);
        CHECK(back.entries[i].pearson_r == table.entries[i].pearson_r);
        CHECK(back.entries[i].selected == table.entries[i].selected);
    }
}

TEST_CASE("raising the threshold never adds queries") {
    oracle::Rng rng(26);
    const int days = 180;
    Date start = parse_date("2020-01-01");
    std::vector<double> y(days);
    for (auto& v : y) v = 10.0 + 2.0 * rng.normal();

    std::string csv = "date,geo,query,value\n";
    for (int t = 0; t < days; ++t) {
        std::string date = to_string(start + std::chrono::days(t));
        for (int q = 0; q < 6; ++q) {
            double corr_part = y[static_cast<size_t>(std::min(days - 1, t + 5))];
            double mix = q / 5.0;
            csv += date + ",CA,q" + std::to_string(q) + "," +
                   std::to_string(
                       std::max(0.0, mix * corr_part + (1 - mix) * 10.0 + rng.normal())) +
                   "\n";
        }
    }
    fs::path path = fs::temp_directory_path() / "thresh_panel.csv";
    std::ofstream(path) << csv;
    RegionTable regions;
    QueryPanel panel = load_query_panel(path.string(), regions);
    fs::remove(path);

    DailySeries deaths{GeoId::nation(), "deaths", start, y};
    std::set<std::string> prev;
    bool first = true;
    for (double threshold : {0.1, 0.3, 0.5, 0.7, 0.9}) {
        LagTable t = score_and_select(deaths, panel, kWindowStart, kWindowEnd, threshold,
                                      {4, 35});
        auto sel = t.selected_queries();
        std::set<std::string> cur(sel.begin(), sel.end());
        if (!first)
            for (const auto& q : cur) CHECK(prev.count(q) == 1);
        prev = cur;
        first = false;
    }
}

TEST_CASE("perfect shift scores r = 1 and zero variance scores 0") {
    oracle::Rng rng(27);
    const int days = 200;
    Date start = parse_date("2020-01-01");
    std::vector<double> x(days);
    for (auto& v : x) v = 30.0 + 4.0 * rng.normal();  // stays positive: no clamping
    std::vector<double> y(days, 0.0);
    for (int t = 11; t < days; ++t) y[static_cast<size_t>(t)] = x[static_cast<size_t>(t - 11)];

    std::string csv = "date,geo,query,value\n";
    for (int t = 0; t < days; ++t) {
        std::string date = to_string(start + std::chrono::days(t));
        csv += date + ",CA,mirror," + std::to_string(std::max(0.0, x[static_cast<size_t>(t)])) +
               "\n";
        csv += date + ",CA,flat,5.0\n";
    }
    fs::path path = fs::temp_directory_path() / "perfect_panel.csv";
    std::ofstream(path) << csv;
    RegionTable regions;
    QueryPanel panel = load_query_panel(path.string(), regions);
    fs::remove(path);

    DailySeries deaths{GeoId::nation(), "deaths", start, y};
    LagTable table = score_and_select(deaths, panel, kWindowStart, kWindowEnd, 0.5, {4, 35});
    const QueryLag* mirror = table.find("mirror");
    const QueryLag* flat = table.find("flat");
    REQUIRE(mirror != nullptr);
    REQUIRE(flat != nullptr);
    CHECK(mirror->pearson_r == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(mirror->optimal_lag == 11);
    CHECK(mirror->selected);
    CHECK(flat->pearson_r == 0.0);
    CHECK_FALSE(flat->selected);
}
