#include "wtn/registry.hpp"

#include "wtn/csv.hpp"
#include "wtn/error.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>

namespace wtn {

CountryRegistry::CountryRegistry(std::vector<Country> countries) : countries_(std::move(countries)) {
    if (countries_.size() < 2) throw InputError("country registry needs at least 2 countries");
    std::sort(countries_.begin(), countries_.end(),
              [](const Country& a, const Country& b) { return a.index < b.index; });
    for (std::size_t i = 0; i < countries_.size(); ++i) {
        const Country& c = countries_[i];
        if (c.index != i)
            throw InputError("country registry indices must be contiguous from 0; missing index " +
                             std::to_string(i));
        if (c.iso3.size() != 3) throw InputError("invalid iso3 code '" + c.iso3 + "'");
        if (!by_iso3_.emplace(c.iso3, i).second) throw InputError("duplicate iso3 code '" + c.iso3 + "'");
    }
}

CountryRegistry CountryRegistry::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open registry file " + path.string());
    return parse(in, path.string());
}

CountryRegistry CountryRegistry::parse(std::istream& in, std::string_view source) {
    std::string line;
    if (!csv::next_line(in, line)) throw InputError(std::string(source) + ": empty registry file");
    const auto header = csv::split_line(line);
    if (header != std::vector<std::string>{"index", "iso3", "name"})
        throw InputError(std::string(source) + ": registry header must be 'index,iso3,name'");

    std::vector<Country> countries;
    std::size_t row = 0;
    while (csv::next_line(in, line)) {
        ++row;
        auto fields = csv::split_line(line);
        if (fields.size() != 3)
            throw InputError(std::string(source) + ": row " + std::to_string(row) + ": expected 3 columns");
        Country c;
        const auto& idx = fields[0];
        auto [ptr, ec] = std::from_chars(idx.data(), idx.data() + idx.size(), c.index);
        if (ec != std::errc{} || ptr != idx.data() + idx.size())
            throw InputError(std::string(source) + ": row " + std::to_string(row) + ": bad index '" + idx + "'");
        c.iso3 = std::move(fields[1]);
        c.name = std::move(fields[2]);
        countries.push_back(std::move(c));
    }
    return CountryRegistry(std::move(countries));
}

std::optional<std::size_t> CountryRegistry::find(std::string_view iso3) const {
    auto it = by_iso3_.find(std::string(iso3));
    if (it == by_iso3_.end()) return std::nullopt;
    return it->second;
}

std::size_t CountryRegistry::index_of(std::string_view iso3) const {
    if (auto i = find(iso3)) return *i;
    throw InputError("unknown iso3 code '" + std::string(iso3) + "'");
}

} // namespace wtn
