// wtn: command-line front end for the trade-network library.
//
//   wtn ranks     ImportRank/ExportRank or PageRank/CheiRank CSV for one year
//   wtn regomax   reduced Google matrix of a country subset
//   wtn simulate  one Monte Carlo ensemble of a scenario at one f_i
//   wtn scenario  full scenario run over all configured years

#include "wtn/error.hpp"
#include "wtn/ingest.hpp"
#include "wtn/regomax.hpp"
#include "wtn/report.hpp"
#include "wtn/scenario.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

namespace fs = std::filesystem;

namespace {

struct DataOptions {
    std::string trade_file;
    std::string registry_file;
    int year = 0;
    double oil_gas_factor = 1.0;
    double alpha = wtn::default_damping;
};

void add_data_options(CLI::App* cmd, DataOptions& d) {
    cmd->add_option("--trade-file", d.trade_file, "Trade CSV (year,exporter_iso3,importer_iso3,value_usd,category)")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--registry-file", d.registry_file, "Registry CSV (index,iso3,name)")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--year", d.year, "Year to aggregate")->required();
    cmd->add_option("--oil-gas-factor", d.oil_gas_factor, "Multiplier K for oil_gas flows")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--alpha", d.alpha, "Damping factor")->check(CLI::Range(0.0, 1.0));
}

struct LoadedYear {
    wtn::CountryRegistry registry;
    wtn::YearModel model;
};

LoadedYear load_year(const DataOptions& d) {
    auto registry = wtn::CountryRegistry::load(d.registry_file);
    const auto records = wtn::load_trade_records(d.trade_file, registry);
    auto model = wtn::build_year_model(records, d.year, d.oil_gas_factor, registry.size(), d.alpha);
    return LoadedYear{std::move(registry), std::move(model)};
}

// Writes to `path`, or stdout when empty.
template <class Fn>
void emit(const std::string& path, Fn&& write) {
    if (path.empty()) {
        write(std::cout);
        return;
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw wtn::Error("cannot write " + path);
    write(out);
}

std::vector<std::size_t> read_subset(const std::string& path, const wtn::CountryRegistry& registry) {
    std::ifstream in(path);
    if (!in) throw wtn::InputError("cannot open subset file " + path);
    std::vector<std::size_t> subset;
    std::string line;
    while (std::getline(in, line)) {
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        const auto first = line.find_first_not_of(" \t\r,");
        if (first == std::string::npos) continue;
        const auto last = line.find_first_of(" \t\r,", first);
        const std::string code = line.substr(first, last == std::string::npos ? std::string::npos : last - first);
        if (code == "iso3") continue;
        subset.push_back(registry.index_of(code));
    }
    return subset;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw wtn::Error("cannot write " + path.string());
    out << text;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"World trade network ranks, reduced Google matrices and currency-preference dynamics"};
    app.require_subcommand(1);

    // ranks
    DataOptions ranks_data;
    std::string ranks_mode = "trade";
    std::string ranks_out;
    auto* ranks = app.add_subcommand("ranks", "Emit ImportRank/ExportRank (trade) or PageRank/CheiRank (google)");
    add_data_options(ranks, ranks_data);
    ranks->add_option("--mode", ranks_mode, "trade or google")->check(CLI::IsMember({"trade", "google"}));
    ranks->add_option("--out", ranks_out, "Output CSV (default stdout)");

    // regomax
    DataOptions reg_data;
    std::string subset_file;
    std::string reg_out = ".";
    std::string direction = "imports";
    auto* regomax = app.add_subcommand("regomax", "Reduced Google matrix for a country subset");
    add_data_options(regomax, reg_data);
    regomax->add_option("--subset", subset_file, "File with one iso3 code per line")
        ->required()
        ->check(CLI::ExistingFile);
    regomax->add_option("--direction", direction, "imports (G) or exports (G*)")
        ->check(CLI::IsMember({"imports", "exports"}));
    regomax->add_option("--out-dir", reg_out, "Directory for G_R.csv, G_rr.csv, G_pr.csv, G_qr.csv, stats.json");

    // simulate
    std::string sim_config;
    int sim_year = 0;
    double sim_f_i = 0.5;
    std::optional<std::size_t> sim_runs;
    std::optional<std::uint64_t> sim_seed;
    unsigned sim_jobs = 1;
    std::string sim_out;
    auto* simulate = app.add_subcommand("simulate", "Run one ensemble of a scenario at a single f_i");
    simulate->add_option("--config", sim_config, "Scenario JSON")->required()->check(CLI::ExistingFile);
    simulate->add_option("--year", sim_year, "Year")->required();
    simulate->add_option("--f-i", sim_f_i, "Initial fraction of the first currency")->check(CLI::Range(0.0, 1.0));
    simulate->add_option("--n-conf", sim_runs, "Number of runs (overrides config)");
    simulate->add_option("--seed", sim_seed, "Master seed (overrides config)");
    simulate->add_option("--jobs", sim_jobs, "Worker threads")->check(CLI::PositiveNumber);
    simulate->add_option("--out", sim_out, "Output JSON (default stdout)");

    // scenario
    std::string scen_config;
    std::string scen_out = "out";
    std::optional<std::uint64_t> scen_seed;
    unsigned scen_jobs = 1;
    auto* scenario = app.add_subcommand("scenario", "Run a scenario over all configured years");
    scenario->add_option("--config", scen_config, "Scenario JSON")->required()->check(CLI::ExistingFile);
    scenario->add_option("--out-dir", scen_out, "Output directory");
    scenario->add_option("--seed", scen_seed, "Master seed (overrides config)");
    scenario->add_option("--jobs", scen_jobs, "Worker threads")->check(CLI::PositiveNumber);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*ranks) {
            const LoadedYear y = load_year(ranks_data);
            emit(ranks_out, [&](std::ostream& out) {
                if (ranks_mode == "google")
                    wtn::write_google_ranks_csv(out, y.registry, y.model.google);
                else
                    wtn::write_trade_ranks_csv(out, y.registry, y.model.weights);
            });
        } else if (*regomax) {
            const LoadedYear y = load_year(reg_data);
            const auto subset = read_subset(subset_file, y.registry);
            const auto dir = direction == "imports" ? wtn::FlowDirection::imports : wtn::FlowDirection::exports;
            const auto g = wtn::build_google(y.model.shares, reg_data.alpha, dir);
            const auto reduced = wtn::reduce(g, subset);
            const auto stats = wtn::component_stats(reduced, y.model.weights);

            const fs::path out_dir(reg_out);
            fs::create_directories(out_dir);
            std::vector<std::string> labels;
            for (std::size_t c : subset) labels.push_back(y.registry.iso3(c));
            const std::pair<const char*, const Eigen::MatrixXd*> parts[] = {
                {"G_R.csv", &reduced.reduced},
                {"G_rr.csv", &reduced.direct},
                {"G_pr.csv", &reduced.pagerank},
                {"G_qr.csv", &reduced.hidden},
            };
            for (const auto& [name, m] : parts) {
                std::ofstream out(out_dir / name, std::ios::binary | std::ios::trunc);
                if (!out) throw wtn::Error(std::string("cannot write ") + name);
                wtn::write_matrix_csv(out, *m, labels);
            }
            write_text(out_dir / "stats.json", wtn::reduced_stats_json(stats, reduced, y.registry).dump(2) + "\n");
        } else if (*simulate) {
            const auto config = wtn::ScenarioConfig::load(sim_config);
            const auto registry = wtn::CountryRegistry::load(config.registry_file);
            const auto core = wtn::CoreGroupSpec::from_iso3(config.currencies, config.core_groups, registry);
            const auto records = wtn::load_trade_records(config.trade_file_for(sim_year), registry);
            const auto model =
                wtn::build_year_model(records, sim_year, config.oil_gas_factor, registry.size(), config.alpha);
            const auto ctx = wtn::make_scoring_context(model.shares, model.weights, config.weight_mode, &model.google);

            wtn::EnsembleOptions eo;
            eo.initial_fraction = sim_f_i;
            eo.runs = sim_runs.value_or(config.n_conf);
            eo.seed = wtn::ensemble_seed(sim_seed.value_or(config.seed), sim_year, 0);
            eo.max_sweeps = config.max_sweeps;
            eo.jobs = sim_jobs;
            const auto summary = wtn::run_ensemble(core, ctx, eo);

            nlohmann::ordered_json j;
            j["scenario"] = config.name;
            j["year"] = sim_year;
            j["currencies"] = config.currencies;
            j["weight_mode"] = wtn::to_string(config.weight_mode);
            j["summary"] = wtn::ensemble_json(summary);
            nlohmann::ordered_json prefs = nlohmann::ordered_json::object();
            for (std::size_t c = 0; c < registry.size(); ++c) prefs[registry.iso3(c)] = summary.pref_prob[c];
            j["pref_prob"] = std::move(prefs);
            emit(sim_out, [&](std::ostream& out) { out << j.dump(2) << '\n'; });
        } else if (*scenario) {
            const auto config = wtn::ScenarioConfig::load(scen_config);
            wtn::RunOptions ro;
            ro.out_dir = scen_out;
            ro.jobs = scen_jobs;
            ro.seed = scen_seed;
            ro.log = &std::cerr;
            const auto report = wtn::run_scenario(config, ro);
            if (report.completed_years.empty()) {
                std::cerr << "no year completed\n";
                return 1;
            }
        }
    } catch (const wtn::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
