#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <unistd.h>
#include <string>
#include <vector>

#include "homesim/block_bootstrap.hpp"
#include "homesim/macro_panel.hpp"

namespace testsupport {

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir
{
public:
    explicit TempDir(const std::string& tag)
        : path_(std::filesystem::temp_directory_path() / ("homesim_test_" + tag + "_" + std::to_string(::getpid())))
    {
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() { std::filesystem::remove_all(path_); }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const noexcept { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

inline void write_text(const std::filesystem::path& file, const std::string& text)
{
    std::ofstream out(file, std::ios::binary);
    out << text;
}

inline std::string read_text(const std::filesystem::path& file)
{
    std::ifstream in(file, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline constexpr const char* kPanelHeader =
    "country,year,stock_return,bond_return,housing_return,rental_yield,hpi,inflation,wage_index\n";

/// Panel with one market state repeated for every year of every country.
inline homesim::MacroPanel constant_panel(const homesim::MarketState& m, const std::vector<std::string>& codes,
                                          int first_year, int years)
{
    homesim::MacroPanel panel;
    for (const auto& code : codes)
        panel.countries.push_back({code, first_year, std::vector<homesim::MarketState>(years, m)});
    return panel;
}

/// Path of `years` identical market states.
inline homesim::EconomicPath constant_path(const homesim::MarketState& m, int years = homesim::kLifeHorizon)
{
    homesim::EconomicPath path;
    for (int t = 0; t < years; ++t)
        path.years.push_back({m, 0, 2000 + t});
    path.block_starts.push_back(0);
    return path;
}

inline bool close_rel(double a, double b, double rel)
{
    return std::abs(a - b) <= rel * std::max({1.0, std::abs(a), std::abs(b)});
}

} // namespace testsupport
