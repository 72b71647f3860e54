#include "wtn/scenario.hpp"

#include "wtn/error.hpp"
#include "wtn/report.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

namespace wtn {

namespace {

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
    std::filesystem::path path(p);
    return path.is_absolute() ? path : base / path;
}

ScenarioConfig parse_config(const nlohmann::json& j, const std::filesystem::path& base_dir);

} // namespace

std::vector<double> default_f_i_grid() {
    std::vector<double> grid;
    for (int i = 1; i <= 19; ++i) grid.push_back(i / 20.0);
    return grid;
}

ScenarioConfig ScenarioConfig::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open scenario file " + path.string());
    std::stringstream buffer;
    buffer << in.rdbuf();
    try {
        return from_json(buffer.str(), path.parent_path());
    } catch (const InputError& e) {
        throw InputError(path.string() + ": " + e.what());
    }
}

ScenarioConfig ScenarioConfig::from_json(const std::string& text, const std::filesystem::path& base_dir) {
    try {
        return parse_config(nlohmann::json::parse(text), base_dir);
    } catch (const nlohmann::json::exception& e) {
        throw InputError(e.what());
    }
}

namespace {

ScenarioConfig parse_config(const nlohmann::json& j, const std::filesystem::path& base_dir) {
    ScenarioConfig c;
    c.name = j.value("name", c.name);
    c.registry_file = resolve(base_dir, j.at("registry_file").get<std::string>());
    c.trade_file = resolve(base_dir, j.at("trade_file").get<std::string>());
    c.years = j.at("years").get<std::vector<int>>();
    c.currencies = j.at("currencies").get<std::vector<std::string>>();
    c.core_groups = j.value("core_groups", c.core_groups);
    c.weight_mode = parse_weight_mode(j.value("weight_mode", std::string(to_string(c.weight_mode))));
    if (j.contains("f_i_grid")) {
        c.f_i_grid = j.at("f_i_grid").get<std::vector<double>>();
    } else if (c.currencies.size() == 2) {
        c.f_i_grid = default_f_i_grid();
    } else {
        // Initial draws ignore f_i beyond two currencies.
        c.f_i_grid = {0.5};
    }
    c.n_conf = j.value("n_conf", c.n_conf);
    c.seed = j.value("seed", c.seed);
    c.max_sweeps = j.value("max_sweeps", c.max_sweeps);
    c.oil_gas_factor = j.value("oil_gas_factor", c.oil_gas_factor);
    c.alpha = j.value("alpha", c.alpha);

    if (c.years.empty()) throw InputError("scenario lists no years");
    if (c.currencies.size() < 2) throw InputError("scenario needs at least two currencies");
    if (c.f_i_grid.empty()) throw InputError("f_i grid is empty");
    for (double f : c.f_i_grid)
        if (!(f >= 0.0 && f <= 1.0)) throw InputError("f_i grid values must lie in [0, 1]");
    if (c.n_conf < 1) throw InputError("n_conf must be at least 1");
    if (c.max_sweeps < 1) throw InputError("max_sweeps must be at least 1");
    return c;
}

} // namespace

std::filesystem::path ScenarioConfig::trade_file_for(int year) const {
    std::string p = trade_file.string();
    const std::string token = "{year}";
    for (auto pos = p.find(token); pos != std::string::npos; pos = p.find(token))
        p.replace(pos, token.size(), std::to_string(year));
    return p;
}

YearModel build_year_model(std::span<const TradeRecord> records, int year, double oil_gas_factor,
                           std::size_t country_count, double alpha) {
    TradeMatrix trade = aggregate_to_matrix(records, year, ScalingSpec(oil_gas_factor), country_count);
    ShareMatrices shares = compute_shares(trade);
    RankWeights weights = compute_rank_weights(trade);
    GoogleRanks google = google_ranks(shares, alpha);
    return YearModel{std::move(trade), std::move(shares), std::move(weights), std::move(google)};
}

std::uint64_t ensemble_seed(std::uint64_t master, int year, std::size_t grid_index) {
    return rng::derive_seed(rng::derive_seed(master, static_cast<std::uint64_t>(year)), grid_index);
}

namespace {

void log_diagnostic(std::ostream* log, const YearDiagnostic& d) {
    if (!log) return;
    nlohmann::ordered_json j;
    j["year"] = d.year;
    j["status"] = d.skipped ? "skipped" : "failed";
    j["message"] = d.message;
    *log << j.dump() << '\n';
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + path.string());
    out << content;
    if (!out) throw Error("failed writing " + path.string());
}

} // namespace

ScenarioReport run_scenario(const ScenarioConfig& config, const RunOptions& options) {
    const CountryRegistry registry = CountryRegistry::load(config.registry_file);
    const CoreGroupSpec core = CoreGroupSpec::from_iso3(config.currencies, config.core_groups, registry);
    const std::uint64_t master_seed = options.seed.value_or(config.seed);
    std::filesystem::create_directories(options.out_dir);

    ScenarioReport report;
    std::vector<GroupTimeSeriesRow> series;
    std::map<std::filesystem::path, std::vector<TradeRecord>> record_cache;

    for (int year : config.years) {
        const std::filesystem::path trade_path = config.trade_file_for(year);
        if (!std::filesystem::exists(trade_path)) {
            YearDiagnostic d{year, true, "missing trade file " + trade_path.string()};
            log_diagnostic(options.log, d);
            report.diagnostics.push_back(std::move(d));
            continue;
        }
        try {
            auto cached = record_cache.find(trade_path);
            if (cached == record_cache.end())
                cached = record_cache.emplace(trade_path, load_trade_records(trade_path, registry)).first;

            const YearModel model =
                build_year_model(cached->second, year, config.oil_gas_factor, registry.size(), config.alpha);
            const ScoringContext ctx =
                make_scoring_context(model.shares, model.weights, config.weight_mode, &model.google);

            std::vector<EnsembleSummary> summaries;
            for (std::size_t g = 0; g < config.f_i_grid.size(); ++g) {
                EnsembleOptions eo;
                eo.initial_fraction = config.f_i_grid[g];
                eo.runs = config.n_conf;
                eo.seed = ensemble_seed(master_seed, year, g);
                eo.max_sweeps = config.max_sweeps;
                eo.jobs = options.jobs;
                summaries.push_back(run_ensemble(core, ctx, eo));
            }
            const std::vector<GroupLabel> labels = classify_groups(summaries);
            const GroupTimeSeriesRow row =
                volume_shares(labels, config.currencies, summaries.front().frozen_currency, model.trade);

            const std::filesystem::path year_dir = options.out_dir / std::to_string(year);
            std::filesystem::create_directories(year_dir);

            std::ostringstream map_csv;
            write_group_map_csv(map_csv, registry, labels, config.currencies);
            write_file(year_dir / "map.csv", map_csv.str());

            nlohmann::ordered_json attractors;
            attractors["scenario"] = config.name;
            attractors["year"] = year;
            attractors["currencies"] = config.currencies;
            attractors["weight_mode"] = to_string(config.weight_mode);
            attractors["oil_gas_factor"] = config.oil_gas_factor;
            attractors["seed"] = master_seed;
            nlohmann::ordered_json grid = nlohmann::ordered_json::array();
            for (const auto& s : summaries) grid.push_back(ensemble_json(s));
            attractors["grid"] = std::move(grid);
            write_file(year_dir / "attractors.json", attractors.dump(2) + "\n");

            std::ostringstream pref_csv;
            write_pref_prob_csv(pref_csv, registry, summaries);
            write_file(year_dir / "pref_prob.csv", pref_csv.str());

            series.push_back(row);
            report.completed_years.push_back(year);
        } catch (const Error& e) {
            YearDiagnostic d{year, false, e.what()};
            log_diagnostic(options.log, d);
            report.diagnostics.push_back(std::move(d));
        }
    }

    std::ostringstream ts;
    write_time_series_header(ts);
    for (const auto& row : series) write_time_series_rows(ts, row);
    write_file(options.out_dir / "timeseries.csv", ts.str());
    return report;
}

} // namespace wtn
