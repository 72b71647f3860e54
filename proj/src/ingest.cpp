#include "wtn/ingest.hpp"

#include "wtn/csv.hpp"
#include "wtn/error.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <string>
#include <tuple>

namespace wtn {

Category parse_category(std::string_view text) {
    if (text == "aggregate") return Category::aggregate;
    if (text == "oil_gas") return Category::oil_gas;
    throw InputError("unknown trade category '" + std::string(text) + "'");
}

std::string_view to_string(Category c) { return c == Category::aggregate ? "aggregate" : "oil_gas"; }

ScalingSpec::ScalingSpec(double oil_gas_factor) : k_(oil_gas_factor) {
    if (!(oil_gas_factor > 0.0) || !std::isfinite(oil_gas_factor))
        throw InputError("oil/gas factor K must be positive and finite");
}

std::vector<TradeRecord> load_trade_records(const std::filesystem::path& path, const CountryRegistry& registry) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open trade file " + path.string());
    return parse_trade_records(in, registry, path.string());
}

namespace {

template <class T>
bool parse_number(const std::string& text, T& out) {
    const char* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, out);
    return ec == std::errc{} && ptr == end;
}

} // namespace

std::vector<TradeRecord> parse_trade_records(std::istream& in, const CountryRegistry& registry,
                                             std::string_view source) {
    const std::string src(source);
    std::string line;
    if (!csv::next_line(in, line)) throw InputError(src + ": missing header");
    const std::vector<std::string> expected{"year", "exporter_iso3", "importer_iso3", "value_usd", "category"};
    if (csv::split_line(line) != expected)
        throw InputError(src + ": header must be 'year,exporter_iso3,importer_iso3,value_usd,category'");

    using Key = std::tuple<int, std::size_t, std::size_t, Category>;
    std::map<Key, double> summed;
    std::size_t row = 0;
    while (csv::next_line(in, line)) {
        ++row;
        const std::string where = src + ": row " + std::to_string(row) + ": ";
        const auto f = csv::split_line(line);
        if (f.size() != 5) throw InputError(where + "expected 5 columns, got " + std::to_string(f.size()));

        int year = 0;
        if (!parse_number(f[0], year)) throw InputError(where + "bad year '" + f[0] + "'");
        const auto exporter = registry.find(f[1]);
        if (!exporter) throw InputError(where + "unknown exporter iso3 '" + f[1] + "'");
        const auto importer = registry.find(f[2]);
        if (!importer) throw InputError(where + "unknown importer iso3 '" + f[2] + "'");
        if (*exporter == *importer) throw InputError(where + "self-loop record for '" + f[1] + "'");
        double value = 0.0;
        if (!parse_number(f[3], value) || !std::isfinite(value)) throw InputError(where + "bad value '" + f[3] + "'");
        if (value < 0.0) throw InputError(where + "negative value");
        Category category;
        try {
            category = parse_category(f[4]);
        } catch (const InputError& e) {
            throw InputError(where + e.what());
        }
        summed[Key{year, *exporter, *importer, category}] += value;
    }

    std::vector<TradeRecord> records;
    records.reserve(summed.size());
    for (const auto& [key, value] : summed) {
        const auto& [year, exporter, importer, category] = key;
        records.push_back(TradeRecord{year, exporter, importer, value, category});
    }
    return records;
}

TradeMatrix aggregate_to_matrix(std::span<const TradeRecord> records, int year, const ScalingSpec& scaling,
                                std::size_t country_count) {
    const auto n = static_cast<Eigen::Index>(country_count);
    Eigen::MatrixXd base = Eigen::MatrixXd::Zero(n, n);
    Eigen::MatrixXd oil_gas = Eigen::MatrixXd::Zero(n, n);
    bool found = false;
    for (const TradeRecord& r : records) {
        if (r.year != year) continue;
        found = true;
        if (r.exporter >= country_count || r.importer >= country_count)
            throw InputError("trade record country index out of range");
        if (r.exporter == r.importer) throw InputError("self-loop trade record");
        auto& layer = r.category == Category::aggregate ? base : oil_gas;
        layer(static_cast<Eigen::Index>(r.importer), static_cast<Eigen::Index>(r.exporter)) += r.value;
    }
    if (!found) throw InputError("no trade records for year " + std::to_string(year));

    Eigen::MatrixXd m = base + scaling.oil_gas_factor() * oil_gas;
    if (!m.allFinite()) throw InputError("non-finite trade matrix entry for year " + std::to_string(year));
    return TradeMatrix(year, std::move(m));
}

} // namespace wtn
