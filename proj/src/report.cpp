#include "wtn/report.hpp"

#include "wtn/csv.hpp"
#include "wtn/error.hpp"

#include <algorithm>
#include <charconv>
#include <numeric>
#include <ostream>

namespace wtn {

GroupTimeSeriesRow volume_shares(std::span<const GroupLabel> labels, std::span<const std::string> currencies,
                                 std::span<const int> frozen_currency, const TradeMatrix& m) {
    const std::size_t n = m.size();
    if (labels.size() != n || frozen_currency.size() != n) throw Error("group labels do not cover every country");
    const TradeTotals t = totals(m);
    if (!(t.total > 0.0)) throw Error("zero total trade volume in year " + std::to_string(m.year()));

    const std::size_t k = currencies.size();
    GroupTimeSeriesRow row;
    row.year = m.year();
    row.groups.resize(k + 1);
    for (std::size_t j = 0; j < k; ++j) row.groups[j].group = currencies[j];
    row.groups[k].group = "swing";

    std::size_t with_data = 0;
    for (std::size_t c = 0; c < n; ++c) {
        const GroupLabel& label = labels[c];
        if (label.kind == GroupLabel::Kind::no_data) continue;
        ++with_data;
        const auto i = static_cast<Eigen::Index>(c);
        const double volume = (t.imports(i) + t.exports(i)) / (2.0 * t.total);
        GroupShare& g = row.groups[label.kind == GroupLabel::Kind::swing ? k : label.currency];
        ++g.countries;
        g.volume_fraction += volume;
        if (label.kind == GroupLabel::Kind::fixed && frozen_currency[c] == static_cast<int>(label.currency)) {
            ++g.core_countries;
            g.core_volume_fraction += volume;
        }
    }
    for (GroupShare& g : row.groups) {
        g.country_fraction = with_data ? static_cast<double>(g.countries) / static_cast<double>(with_data) : 0.0;
        g.core_country_fraction =
            with_data ? static_cast<double>(g.core_countries) / static_cast<double>(with_data) : 0.0;
    }
    return row;
}

std::string format_number(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    if (ec != std::errc{}) throw Error("number formatting failed");
    return std::string(buf, ptr);
}

namespace {

std::vector<std::size_t> order_by_max(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    std::vector<std::size_t> order(static_cast<std::size_t>(a.size()));
    std::iota(order.begin(), order.end(), std::size_t{0});
    auto key = [&](std::size_t c) {
        const auto i = static_cast<Eigen::Index>(c);
        return std::max(a(i), b(i));
    };
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return key(x) > key(y); });
    return order;
}

void write_rank_pair(std::ostream& out, const CountryRegistry& registry, const char* header, const Eigen::VectorXd& a,
                     const Eigen::VectorXd& b) {
    out << header << '\n';
    for (std::size_t c : order_by_max(a, b)) {
        const auto i = static_cast<Eigen::Index>(c);
        out << registry.iso3(c) << ',' << format_number(a(i)) << ',' << format_number(b(i)) << '\n';
    }
}

} // namespace

void write_trade_ranks_csv(std::ostream& out, const CountryRegistry& registry, const RankWeights& weights) {
    write_rank_pair(out, registry, "iso3,import_rank,export_rank", weights.import_rank, weights.export_rank);
}

void write_google_ranks_csv(std::ostream& out, const CountryRegistry& registry, const GoogleRanks& ranks) {
    write_rank_pair(out, registry, "iso3,pagerank,cheirank", ranks.pagerank.vector, ranks.cheirank.vector);
}

void write_matrix_csv(std::ostream& out, const Eigen::MatrixXd& m, std::span<const std::string> labels) {
    out << "iso3";
    for (const auto& l : labels) out << ',' << csv::escape(l);
    out << '\n';
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        out << csv::escape(labels[static_cast<std::size_t>(i)]);
        for (Eigen::Index j = 0; j < m.cols(); ++j) out << ',' << format_number(m(i, j));
        out << '\n';
    }
}

nlohmann::ordered_json reduced_stats_json(const ReducedStats& stats, const ReducedGoogle& r,
                                          const CountryRegistry& registry) {
    nlohmann::ordered_json j;
    j["lambda_c"] = stats.lambda_c ? nlohmann::ordered_json(*stats.lambda_c) : nlohmann::ordered_json(nullptr);
    j["weights"] = {{"W_R", stats.weights.total},
                    {"W_rr", stats.weights.direct},
                    {"W_pr", stats.weights.pagerank},
                    {"W_qr", stats.weights.hidden}};
    j["neg_stat"] = stats.negative_weight_ratio;
    nlohmann::ordered_json totals = nlohmann::ordered_json::object();
    for (std::size_t i = 0; i < r.subset.size(); ++i) totals[registry.iso3(r.subset[i])] = stats.incoming_totals[i];
    j["T"] = std::move(totals);
    nlohmann::ordered_json order = nlohmann::ordered_json::array();
    for (std::size_t pos : stats.order) order.push_back(registry.iso3(r.subset[pos]));
    j["order"] = std::move(order);
    j["series_terms"] = r.series_terms;
    return j;
}

nlohmann::ordered_json ensemble_json(const EnsembleSummary& s) {
    nlohmann::ordered_json j;
    j["f_i"] = s.initial_fraction;
    j["n_conf"] = s.runs;
    j["converged_runs"] = s.converged_runs;
    j["non_converged_runs"] = s.non_converged_runs;
    j["counted_countries"] = s.counted_countries;
    j["mean_tau"] = s.mean_sweeps;
    j["mean_f_f"] = s.mean_final_fraction;
    nlohmann::ordered_json attractors = nlohmann::ordered_json::array();
    for (const Attractor& a : s.attractors) {
        nlohmann::ordered_json entry;
        nlohmann::ordered_json fractions = nlohmann::ordered_json::object();
        nlohmann::ordered_json counts = nlohmann::ordered_json::object();
        for (std::size_t k = 0; k < s.currencies.size(); ++k) {
            fractions[s.currencies[k]] = a.fractions[k];
            counts[s.currencies[k]] = a.counts[k];
        }
        entry["f_f"] = a.fractions[0];
        entry["probability"] = a.probability;
        entry["runs"] = a.runs;
        entry["fractions"] = std::move(fractions);
        entry["counts"] = std::move(counts);
        attractors.push_back(std::move(entry));
    }
    j["attractors"] = std::move(attractors);
    j["mean_fraction_by_sweep"] = s.mean_fraction_by_sweep;
    return j;
}

void write_group_map_csv(std::ostream& out, const CountryRegistry& registry, std::span<const GroupLabel> labels,
                         std::span<const std::string> currencies) {
    out << "iso3,group_label\n";
    for (std::size_t c = 0; c < labels.size(); ++c)
        out << registry.iso3(c) << ',' << csv::escape(group_name(labels[c], currencies)) << '\n';
}

void write_pref_prob_csv(std::ostream& out, const CountryRegistry& registry,
                         std::span<const EnsembleSummary> summaries) {
    if (summaries.empty()) return;
    out << "f_i,iso3";
    for (const auto& cur : summaries.front().currencies) out << ",pref_prob_" << csv::escape(cur);
    out << '\n';
    for (const EnsembleSummary& s : summaries) {
        const std::string f_i = format_number(s.initial_fraction);
        for (std::size_t c = 0; c < s.pref_prob.size(); ++c) {
            out << f_i << ',' << registry.iso3(c);
            for (double p : s.pref_prob[c]) out << ',' << format_number(p);
            out << '\n';
        }
    }
}

void write_time_series_header(std::ostream& out) {
    out << "year,group,countries,country_fraction,volume_fraction,core_countries,core_country_fraction,"
           "core_volume_fraction\n";
}

void write_time_series_rows(std::ostream& out, const GroupTimeSeriesRow& row) {
    for (const GroupShare& g : row.groups) {
        out << row.year << ',' << csv::escape(g.group) << ',' << g.countries << ',' << format_number(g.country_fraction)
            << ',' << format_number(g.volume_fraction) << ',' << g.core_countries << ','
            << format_number(g.core_country_fraction) << ',' << format_number(g.core_volume_fraction) << '\n';
    }
}

} // namespace wtn
