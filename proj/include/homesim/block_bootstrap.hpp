#pragma once

#include <cstddef>
#include <filesystem>
#include <vector>

#include "homesim/macro_panel.hpp"
#include "homesim/rng.hpp"

namespace homesim {

inline constexpr int kLifeHorizon = 75;
inline constexpr double kMeanBlockLength = 10.0;

/// One bootstrapped year: the market state and where it came from.
struct PathYear
{
    MarketState market;
    int country = 0; // index into MacroPanel::countries
    int source_year = 0;
};

struct EconomicPath
{
    std::vector<PathYear> years;
    std::vector<std::size_t> block_starts; // index of the first year of each block
    std::vector<int> drawn_lengths;        // geometric draws before end-of-series truncation

    std::size_t size() const noexcept { return years.size(); }
    const MarketState& operator[](std::size_t t) const { return years[t].market; }
};

/// Geometric block length on {1, 2, ...} with the given mean.
int draw_block_length(Xoshiro256& rng, double mean_length = kMeanBlockLength);

/// Stationary block bootstrap: uniform country, uniform start year within
/// that country, geometric length truncated at the end of the series (no
/// wrap-around). Blocks are concatenated until `horizon` years are filled and
/// the surplus of the last block is dropped.
EconomicPath sample_path(const MacroPanel& panel, Xoshiro256& rng, int horizon = kLifeHorizon,
                         double mean_length = kMeanBlockLength);

/// Debug dump: one row per path year.
void write_path_csv(const MacroPanel& panel, const EconomicPath& path, const std::filesystem::path& file);

} // namespace homesim
