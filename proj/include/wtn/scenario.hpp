#pragma once

#include "wtn/flow.hpp"
#include "wtn/google.hpp"
#include "wtn/ingest.hpp"
#include "wtn/opinion.hpp"
#include "wtn/registry.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace wtn {

// Scenario file (JSON). Relative paths resolve against the file's directory.
// `trade_file` may contain "{year}" to select one file per year.
struct ScenarioConfig {
    std::string name = "scenario";
    std::filesystem::path registry_file;
    std::filesystem::path trade_file;
    std::vector<int> years;
    std::vector<std::string> currencies;
    std::map<std::string, std::vector<std::string>> core_groups;  // currency -> iso3 list
    WeightMode weight_mode = WeightMode::import_export;
    std::vector<double> f_i_grid;
    std::size_t n_conf = 10'000;
    std::uint64_t seed = 1;
    int max_sweeps = 100;
    double oil_gas_factor = 1.0;
    double alpha = default_damping;

    static ScenarioConfig load(const std::filesystem::path& path);
    static ScenarioConfig from_json(const std::string& text, const std::filesystem::path& base_dir);

    std::filesystem::path trade_file_for(int year) const;
};

// 0.05, 0.10, ..., 0.95.
std::vector<double> default_f_i_grid();

// Matrices and rank vectors for one year.
struct YearModel {
    TradeMatrix trade;
    ShareMatrices shares;
    RankWeights weights;
    GoogleRanks google;
};

YearModel build_year_model(std::span<const TradeRecord> records, int year, double oil_gas_factor,
                           std::size_t country_count, double alpha = default_damping);

struct YearDiagnostic {
    int year = 0;
    bool skipped = false;  // missing data file
    std::string message;
};

struct ScenarioReport {
    std::vector<int> completed_years;
    std::vector<YearDiagnostic> diagnostics;
};

struct RunOptions {
    std::filesystem::path out_dir;
    unsigned jobs = 1;
    std::optional<std::uint64_t> seed;  // overrides the config seed
    std::ostream* log = nullptr;        // diagnostics as JSON lines
};

// Per year: ingest, matrices, ranks, ensembles over the f_i grid,
// classification. Writes <out>/<year>/{map.csv,attractors.json,pref_prob.csv}
// and <out>/timeseries.csv. A failing year is reported and skipped.
ScenarioReport run_scenario(const ScenarioConfig& config, const RunOptions& options);

// Seed used for grid point `grid_index` of `year`.
std::uint64_t ensemble_seed(std::uint64_t master, int year, std::size_t grid_index);

} // namespace wtn
