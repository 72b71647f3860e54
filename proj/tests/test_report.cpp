#include "support.hpp"

#include "wtn/error.hpp"
#include "wtn/report.hpp"
#include "wtn/scenario.hpp"

#include <doctest.h>

#include <sstream>

using namespace wtn;
using doctest::Approx;

namespace {

CountryRegistry abc_registry() {
    return CountryRegistry({{0, "AAA", "A"}, {1, "BBB", "B"}, {2, "CCC", "C"}});
}

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) out.push_back(line);
    return out;
}

} // namespace

TEST_CASE("volume shares by group") {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(3, 3);
    m(0, 1) = 2.0;
    m(1, 0) = 1.0;
    m(2, 0) = 1.0;
    const TradeMatrix trade(2012, m);
    const std::vector<std::string> currencies{"USD", "BRI"};
    const std::vector<GroupLabel> labels{{GroupLabel::Kind::fixed, 0},
                                         {GroupLabel::Kind::fixed, 1},
                                         {GroupLabel::Kind::swing, 0}};
    const std::vector<int> frozen{0, -1, -1};
    const auto row = volume_shares(labels, currencies, frozen, trade);
    CHECK(row.year == 2012);
    REQUIRE(row.groups.size() == 3);
    CHECK(row.groups[0].group == "USD");
    CHECK(row.groups[2].group == "swing");
    CHECK(row.groups[0].volume_fraction == Approx(0.5));
    CHECK(row.groups[1].volume_fraction == Approx(0.375));
    CHECK(row.groups[2].volume_fraction == Approx(0.125));
    CHECK(row.groups[0].country_fraction == Approx(1.0 / 3.0));
    CHECK(row.groups[0].core_countries == 1);
    CHECK(row.groups[0].core_volume_fraction == Approx(0.5));
    CHECK(row.groups[1].core_countries == 0);

    SUBCASE("countries without data are left out") {
        auto partial = labels;
        partial[2] = {GroupLabel::Kind::no_data, 0};
        const auto r = volume_shares(partial, currencies, frozen, trade);
        CHECK(r.groups[0].country_fraction == Approx(0.5));
        CHECK(r.groups[2].countries == 0);
    }
    SUBCASE("zero-volume year") {
        const TradeMatrix empty(2013, Eigen::MatrixXd::Zero(3, 3));
        CHECK_THROWS_AS(volume_shares(labels, currencies, frozen, empty), Error);
    }
    SUBCASE("label count must match") {
        CHECK_THROWS_AS(volume_shares(std::span(labels).first(2), currencies, frozen, trade), Error);
    }
}

TEST_CASE("number formatting round-trips") {
    CHECK(format_number(0.1) == "0.1");
    CHECK(format_number(1.0) == "1");
    const double x = 1.0 / 3.0;
    CHECK(std::stod(format_number(x)) == x);
}

TEST_CASE("rank CSV files") {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(3, 3);
    m(0, 1) = 1.0;
    m(2, 1) = 5.0;
    m(1, 2) = 2.0;
    const TradeMatrix trade(2000, m);
    std::ostringstream out;
    write_trade_ranks_csv(out, abc_registry(), compute_rank_weights(trade));
    const auto lines = lines_of(out.str());
    REQUIRE(lines.size() == 4);
    CHECK(lines[0] == "iso3,import_rank,export_rank");
    // Exports: B = 6/8 leads, C = 5/8 imports next, A last.
    CHECK(lines[1] == "BBB,0.25,0.75");
    CHECK(lines[2] == "CCC,0.625,0.25");
    CHECK(lines[3] == "AAA,0.125,0");

    std::ostringstream g;
    write_google_ranks_csv(g, abc_registry(), google_ranks(compute_shares(trade)));
    CHECK(lines_of(g.str()).front() == "iso3,pagerank,cheirank");
    CHECK(lines_of(g.str()).size() == 4);
}

TEST_CASE("matrix CSV") {
    Eigen::MatrixXd m(2, 2);
    m << 0.5, 0.25, 1.0, 0.0;
    std::ostringstream out;
    const std::vector<std::string> labels{"AAA", "BBB"};
    write_matrix_csv(out, m, labels);
    CHECK(out.str() == "iso3,AAA,BBB\nAAA,0.5,0.25\nBBB,1,0\n");
}

TEST_CASE("ensemble JSON and group map") {
    testing::Rng gen(3);
    const TradeMatrix trade(2001, testing::random_connected_flows(gen, 3));
    const auto shares = compute_shares(trade);
    const auto ctx = make_scoring_context(shares, compute_rank_weights(trade), WeightMode::import_export);
    const CoreGroupSpec core{{"USD", "BRI"}, {{0}, {1}}};
    EnsembleOptions opts;
    opts.runs = 20;
    const auto s = run_ensemble(core, ctx, opts);
    const auto j = ensemble_json(s);
    for (const char* key : {"f_i", "n_conf", "converged_runs", "non_converged_runs", "counted_countries", "mean_tau",
                            "mean_f_f", "attractors", "mean_fraction_by_sweep"})
        CHECK(j.contains(key));
    CHECK(j["n_conf"] == 20);
    REQUIRE(!j["attractors"].empty());
    const auto& a = j["attractors"][0];
    CHECK(a.contains("f_f"));
    CHECK(a["fractions"].contains("USD"));
    CHECK(a["counts"].contains("BRI"));

    const std::vector<EnsembleSummary> grid{s};
    const auto labels = classify_groups(grid);
    std::ostringstream map;
    write_group_map_csv(map, abc_registry(), labels, s.currencies);
    const auto lines = lines_of(map.str());
    CHECK(lines[0] == "iso3,group_label");
    CHECK(lines[1] == "AAA,USD");
    CHECK(lines[2] == "BBB,BRI");

    std::ostringstream pref;
    write_pref_prob_csv(pref, abc_registry(), grid);
    CHECK(lines_of(pref.str())[0] == "f_i,iso3,pref_prob_USD,pref_prob_BRI");
    CHECK(lines_of(pref.str())[1] == "0.5,AAA,1,0");
}

TEST_CASE("scenario config parsing") {
    const auto base = std::filesystem::path("/data/configs");
    const auto c = ScenarioConfig::from_json(R"({
        "registry_file": "reg.csv", "trade_file": "/abs/trade_{year}.csv",
        "years": [2010, 2011], "currencies": ["USD", "BRI"],
        "core_groups": {"USD": ["USA"]}
    })",
                                             base);
    CHECK(c.registry_file == base / "reg.csv");
    CHECK(c.trade_file_for(2011) == std::filesystem::path("/abs/trade_2011.csv"));
    CHECK(c.f_i_grid.size() == 19);
    CHECK(c.f_i_grid.front() == Approx(0.05));
    CHECK(c.f_i_grid.back() == Approx(0.95));
    CHECK(c.n_conf == 10000);
    CHECK(c.weight_mode == WeightMode::import_export);
    CHECK(c.oil_gas_factor == 1.0);

    const auto three = ScenarioConfig::from_json(R"({
        "registry_file": "r", "trade_file": "t", "years": [2010],
        "currencies": ["USD", "EUR", "BRI"], "weight_mode": "uniform"
    })",
                                                 base);
    CHECK(three.f_i_grid == std::vector<double>{0.5});
    CHECK(three.weight_mode == WeightMode::uniform);

    CHECK_THROWS_AS(ScenarioConfig::from_json("{", base), InputError);
    CHECK_THROWS_AS(ScenarioConfig::from_json(R"({"registry_file": "r", "trade_file": "t", "years": [],
        "currencies": ["USD", "BRI"]})",
                                              base),
                    InputError);
    CHECK_THROWS_AS(ScenarioConfig::from_json(R"({"registry_file": "r", "trade_file": "t", "years": [1],
        "currencies": ["USD", "BRI"], "f_i_grid": [1.5]})",
                                              base),
                    InputError);
    CHECK_THROWS_AS(ScenarioConfig::load("/nonexistent/scenario.json"), InputError);
}

TEST_CASE("scenario run writes a reproducible bundle") {
    const auto dir = testing::scratch_dir("scenario");
    const auto cfg_path = testing::write_toy_dataset(dir, {2010, 2011}, 100);
    auto config = ScenarioConfig::load(cfg_path);
    config.years.push_back(2012);  // no data file for this year

    std::ostringstream log;
    RunOptions opts;
    opts.out_dir = dir / "out1";
    opts.log = &log;
    const auto report = run_scenario(config, opts);
    CHECK(report.completed_years == std::vector<int>{2010, 2011});
    REQUIRE(report.diagnostics.size() == 1);
    CHECK(report.diagnostics[0].year == 2012);
    CHECK(report.diagnostics[0].skipped);
    CHECK(log.str().find("2012") != std::string::npos);

    for (const char* f : {"map.csv", "attractors.json", "pref_prob.csv"})
        CHECK(std::filesystem::exists(opts.out_dir / "2010" / f));
    const auto ts = lines_of(testing::slurp(opts.out_dir / "timeseries.csv"));
    REQUIRE(ts.size() == 1 + 2 * 3);
    CHECK(ts[1].rfind("2010,USD,", 0) == 0);
    CHECK(ts[3].rfind("2010,swing,", 0) == 0);

    const auto map = lines_of(testing::slurp(opts.out_dir / "2010" / "map.csv"));
    CHECK(map[1] == "USA,USD");
    CHECK(map[4] == "CHN,BRI");
    CHECK(map.back() == "TUR,no_data");

    const auto attractors = nlohmann::json::parse(testing::slurp(opts.out_dir / "2010" / "attractors.json"));
    CHECK(attractors["grid"].size() == 3);
    CHECK(attractors["oil_gas_factor"] == 2.0);

    RunOptions again = opts;
    again.out_dir = dir / "out2";
    again.jobs = 3;
    again.log = nullptr;
    run_scenario(config, again);
    for (const char* f : {"2010/map.csv", "2010/attractors.json", "2010/pref_prob.csv", "2011/pref_prob.csv",
                          "timeseries.csv"})
        CHECK(testing::slurp(opts.out_dir / f) == testing::slurp(again.out_dir / f));

    RunOptions reseeded = again;
    reseeded.out_dir = dir / "out3";
    reseeded.seed = 12345;
    run_scenario(config, reseeded);
    CHECK(testing::slurp(opts.out_dir / "2010/attractors.json") !=
          testing::slurp(reseeded.out_dir / "2010/attractors.json"));
    std::filesystem::remove_all(dir);
}

TEST_CASE("a malformed year fails without stopping the run") {
    const auto dir = testing::scratch_dir("bad_year");
    const auto cfg_path = testing::write_toy_dataset(dir, {2010, 2011}, 20);
    {
        std::ofstream bad(dir / "trade_2010.csv");
        bad << "year,exporter_iso3,importer_iso3,value_usd,category\n2010,USA,XXX,5,aggregate\n";
    }
    RunOptions opts;
    opts.out_dir = dir / "out";
    const auto report = run_scenario(ScenarioConfig::load(cfg_path), opts);
    CHECK(report.completed_years == std::vector<int>{2011});
    REQUIRE(report.diagnostics.size() == 1);
    CHECK_FALSE(report.diagnostics[0].skipped);
    CHECK(report.diagnostics[0].message.find("XXX") != std::string::npos);
    std::filesystem::remove_all(dir);
}

TEST_CASE("ensemble seeds differ across years and grid points") {
    CHECK(ensemble_seed(1, 2010, 0) != ensemble_seed(1, 2011, 0));
    CHECK(ensemble_seed(1, 2010, 0) != ensemble_seed(1, 2010, 1));
    CHECK(ensemble_seed(1, 2010, 0) == ensemble_seed(1, 2010, 0));
}
