#pragma once

#include "wtn/flow.hpp"
#include "wtn/google.hpp"
#include "wtn/opinion.hpp"
#include "wtn/regomax.hpp"
#include "wtn/registry.hpp"

#include <json.hpp>

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace wtn {

struct GroupShare {
    std::string group;
    std::size_t countries = 0;
    double country_fraction = 0.0;       // over countries with data
    double volume_fraction = 0.0;        // sum (M_c + M*_c) / 2M
    std::size_t core_countries = 0;
    double core_country_fraction = 0.0;  // core members of this currency
    double core_volume_fraction = 0.0;
};

struct GroupTimeSeriesRow {
    int year = 0;
    std::vector<GroupShare> groups;  // one per currency, then "swing"
};

// Country and trade-volume share of each group. `frozen_currency` holds the
// core currency per country (-1 for free). Throws Error when the year has no
// trade volume.
GroupTimeSeriesRow volume_shares(std::span<const GroupLabel> labels, std::span<const std::string> currencies,
                                 std::span<const int> frozen_currency, const TradeMatrix& m);

// Shortest round-trip decimal form; stable across runs.
std::string format_number(double v);

// `iso3,import_rank,export_rank` sorted by descending max of the two ranks.
void write_trade_ranks_csv(std::ostream& out, const CountryRegistry& registry, const RankWeights& weights);
// `iso3,pagerank,cheirank` with the same ordering rule.
void write_google_ranks_csv(std::ostream& out, const CountryRegistry& registry, const GoogleRanks& ranks);

// Square matrix with an `iso3` header row and label column.
void write_matrix_csv(std::ostream& out, const Eigen::MatrixXd& m, std::span<const std::string> labels);

nlohmann::ordered_json reduced_stats_json(const ReducedStats& stats, const ReducedGoogle& r,
                                          const CountryRegistry& registry);

nlohmann::ordered_json ensemble_json(const EnsembleSummary& s);

void write_group_map_csv(std::ostream& out, const CountryRegistry& registry, std::span<const GroupLabel> labels,
                         std::span<const std::string> currencies);

// Long format: `f_i,iso3,pref_prob_<currency>...`, one block per summary.
void write_pref_prob_csv(std::ostream& out, const CountryRegistry& registry,
                         std::span<const EnsembleSummary> summaries);

void write_time_series_header(std::ostream& out);
void write_time_series_rows(std::ostream& out, const GroupTimeSeriesRow& row);

} // namespace wtn
