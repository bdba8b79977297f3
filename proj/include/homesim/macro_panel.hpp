#pragma once

#include <filesystem>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace homesim {

/// Raised for unreadable, malformed or inconsistent input data files.
class DataError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// One country-year of the panel. Returns are nominal decimal fractions;
/// `hpi` is a house-price-to-income ratio once the panel has been rescaled.
struct MarketState
{
    double stock_return = 0.0;
    double bond_return = 0.0;
    double housing_return = 0.0;
    double rental_yield = 0.0;
    double hpi = 1.0;
    double inflation = 0.0;
    double wage_index = 100.0;
};

struct CountrySeries
{
    std::string country_code;
    int first_year = 0;
    std::vector<MarketState> rows; // rows[k] is year first_year + k

    int last_year() const noexcept { return first_year + static_cast<int>(rows.size()) - 1; }
    bool contains(int year) const noexcept { return year >= first_year && year <= last_year(); }
    const MarketState& at_year(int year) const { return rows.at(static_cast<std::size_t>(year - first_year)); }
};

struct MacroPanel
{
    std::vector<CountrySeries> countries; // sorted by country code
    int anchor_year = 0;                  // 0 until rescale_hpi has run
    double anchor_value = 0.0;

    const CountrySeries* find(const std::string& code) const;
    std::size_t country_years() const;
};

struct LoadOptions
{
    /// Countries dropped for limited data availability.
    std::set<std::string> excluded = {"CAN", "IRL"};
    /// When set, only these countries are kept (applied after exclusions).
    std::optional<std::set<std::string>> country_filter;
};

/// Result of loading: the panel plus a human-readable validation report.
struct LoadResult
{
    MacroPanel panel;
    std::vector<std::string> report;
};

/// Read a long-format panel CSV (header: country, year, stock_return,
/// bond_return, housing_return, rental_yield, hpi, inflation, wage_index).
/// `path` may be the CSV itself or a directory holding `macro_panel.csv`.
/// Leading rows with missing fields are dropped; a missing year or missing
/// field after a country's first complete year is a DataError.
LoadResult load_panel(const std::filesystem::path& path, const LoadOptions& options = {});

/// Write the panel in the same long format. Values round-trip exactly.
void write_panel(const MacroPanel& panel, const std::filesystem::path& file);

/// Scale every country's HPI by the single factor that makes the reference
/// country's `anchor_year` value equal `anchor_value`.
MacroPanel rescale_hpi(MacroPanel panel, int anchor_year, double anchor_value,
                       const std::string& reference_country = "USA");

/// (1 + nominal) / (1 + inflation) - 1.
double to_real(double nominal_return, double inflation);

/// Order-sensitive hash of every value in the panel; identifies the data a
/// run was made with.
std::string panel_fingerprint(const MacroPanel& panel);

/// Named country groups accepted wherever a country filter is parsed
/// ("US", "UK", "EUROPE").
std::set<std::string> expand_country_list(const std::string& spec);

} // namespace homesim
