#pragma once

#include "wtn/flow.hpp"
#include "wtn/registry.hpp"

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

namespace wtn {

enum class Category { aggregate, oil_gas };

Category parse_category(std::string_view text);
std::string_view to_string(Category c);

// One bilateral flow, exporter -> importer, in USD. Country fields are
// registry indices.
struct TradeRecord {
    int year = 0;
    std::size_t exporter = 0;
    std::size_t importer = 0;
    double value = 0.0;
    Category category = Category::aggregate;

    friend bool operator==(const TradeRecord&, const TradeRecord&) = default;
};

// Multiplier applied to the oil_gas layer; 1 is the identity.
class ScalingSpec {
public:
    ScalingSpec() = default;
    explicit ScalingSpec(double oil_gas_factor);

    double oil_gas_factor() const noexcept { return k_; }

private:
    double k_ = 1.0;
};

// Reads the trade CSV (`year,exporter_iso3,importer_iso3,value_usd,category`).
// Rows sharing (year, exporter, importer, category) are summed. The result is
// sorted by that key. Errors name the 1-based data row.
std::vector<TradeRecord> load_trade_records(const std::filesystem::path& path, const CountryRegistry& registry);
std::vector<TradeRecord> parse_trade_records(std::istream& in, const CountryRegistry& registry,
                                             std::string_view source = "<stream>");

// M(importer, exporter) = aggregate + K * oil_gas for the requested year.
// Throws InputError when the year has no records.
TradeMatrix aggregate_to_matrix(std::span<const TradeRecord> records, int year, const ScalingSpec& scaling,
                                std::size_t country_count);

} // namespace wtn
