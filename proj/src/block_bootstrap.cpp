#include "homesim/block_bootstrap.hpp"

#include <cmath>
#include <fstream>
#include <random>

#include <fmt/format.h>

namespace homesim {

int draw_block_length(Xoshiro256& rng, double mean_length)
{
    // std::geometric_distribution counts failures, so shift onto {1, 2, ...}.
    std::geometric_distribution<int> failures(1.0 / mean_length);
    return failures(rng) + 1;
}

EconomicPath sample_path(const MacroPanel& panel, Xoshiro256& rng, int horizon, double mean_length)
{
    if (panel.countries.empty())
        throw DataError("cannot bootstrap from an empty panel");

    EconomicPath path;
    path.years.reserve(static_cast<std::size_t>(horizon));
    const auto n_countries = static_cast<int>(panel.countries.size());
    while (static_cast<int>(path.years.size()) < horizon) {
        std::uniform_int_distribution<int> pick_country(0, n_countries - 1);
        const int c = pick_country(rng);
        const auto& series = panel.countries[static_cast<std::size_t>(c)];
        const int n_years = static_cast<int>(series.rows.size());
        std::uniform_int_distribution<int> pick_start(0, n_years - 1);
        const int start = pick_start(rng);

        const int drawn = draw_block_length(rng, mean_length);
        path.drawn_lengths.push_back(drawn);
        const int remaining = horizon - static_cast<int>(path.years.size());
        const int take = std::min({drawn, n_years - start, remaining});

        path.block_starts.push_back(path.years.size());
        for (int k = 0; k < take; ++k) {
            const auto idx = static_cast<std::size_t>(start + k);
            path.years.push_back(PathYear{series.rows[idx], c, series.first_year + start + k});
        }
    }
    return path;
}

void write_path_csv(const MacroPanel& panel, const EconomicPath& path, const std::filesystem::path& file)
{
    std::ofstream out(file);
    if (!out)
        throw DataError("cannot write " + file.string());
    out << "t,block,country,year,stock_return,bond_return,housing_return,rental_yield,hpi,inflation\n";
    std::size_t block = 0;
    for (std::size_t t = 0; t < path.years.size(); ++t) {
        if (block + 1 < path.block_starts.size() && path.block_starts[block + 1] == t)
            ++block;
        const auto& y = path.years[t];
        const auto& s = y.market;
        out << fmt::format("{},{},{},{},{},{},{},{},{},{}\n", t, block,
                           panel.countries[static_cast<std::size_t>(y.country)].country_code, y.source_year,
                           s.stock_return, s.bond_return, s.housing_return, s.rental_yield, s.hpi, s.inflation);
    }
}

} // namespace homesim
