#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace wtn {

struct Country {
    std::size_t index = 0;
    std::string iso3;
    std::string name;
};

// Ordered set of countries. Indices are contiguous 0..N-1, iso3 codes unique,
// N >= 2.
class CountryRegistry {
public:
    explicit CountryRegistry(std::vector<Country> countries);

    static CountryRegistry load(const std::filesystem::path& path);
    static CountryRegistry parse(std::istream& in, std::string_view source = "<stream>");

    std::size_t size() const noexcept { return countries_.size(); }
    const Country& operator[](std::size_t i) const { return countries_[i]; }
    const std::string& iso3(std::size_t i) const { return countries_.at(i).iso3; }
    const std::vector<Country>& countries() const noexcept { return countries_; }

    std::optional<std::size_t> find(std::string_view iso3) const;
    // Throws InputError for unknown codes.
    std::size_t index_of(std::string_view iso3) const;

private:
    std::vector<Country> countries_;
    std::unordered_map<std::string, std::size_t> by_iso3_;
};

} // namespace wtn
