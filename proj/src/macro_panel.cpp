#include "homesim/macro_panel.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>

#include <fmt/format.h>

namespace homesim {

namespace {

constexpr std::array<const char*, 9> kColumns = {
    "country", "year", "stock_return", "bond_return", "housing_return",
    "rental_yield", "hpi", "inflation", "wage_index",
};

std::vector<std::string> split_csv_line(const std::string& line)
{
    std::vector<std::string> fields;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, ',')) {
        while (!field.empty() && (field.back() == '\r' || field.back() == ' '))
            field.pop_back();
        while (!field.empty() && field.front() == ' ')
            field.erase(field.begin());
        fields.push_back(field);
    }
    if (!line.empty() && line.back() == ',')
        fields.emplace_back();
    return fields;
}

std::optional<double> parse_double(const std::string& text)
{
    if (text.empty() || text == "NA" || text == "NaN" || text == "nan")
        return std::nullopt;
    double value = 0.0;
    const char* first = text.data();
    if (*first == '+')
        ++first;
    auto [ptr, ec] = std::from_chars(first, text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size())
        throw DataError("not a number: '" + text + "'");
    return value;
}

struct RawRow
{
    int year = 0;
    std::array<std::optional<double>, 7> values;
    bool complete() const
    {
        return std::all_of(values.begin(), values.end(), [](const auto& v) { return v.has_value(); });
    }
};

MarketState to_state(const RawRow& raw)
{
    MarketState s;
    s.stock_return = *raw.values[0];
    s.bond_return = *raw.values[1];
    s.housing_return = *raw.values[2];
    s.rental_yield = *raw.values[3];
    s.hpi = *raw.values[4];
    s.inflation = *raw.values[5];
    s.wage_index = *raw.values[6];
    return s;
}

void check_state(const std::string& country, int year, const MarketState& s)
{
    auto fail = [&](const char* what) {
        throw DataError(fmt::format("{} {}: {}", country, year, what));
    };
    if (s.rental_yield < 0.0)
        fail("rental_yield must be >= 0");
    if (!(s.hpi > 0.0))
        fail("hpi must be > 0");
    if (s.stock_return <= -1.0 || s.bond_return <= -1.0 || s.housing_return <= -1.0)
        fail("returns must be > -1");
    if (s.inflation <= -1.0)
        fail("inflation must be > -1");
}

} // namespace

const CountrySeries* MacroPanel::find(const std::string& code) const
{
    auto it = std::find_if(countries.begin(), countries.end(),
                           [&](const CountrySeries& c) { return c.country_code == code; });
    return it == countries.end() ? nullptr : &*it;
}

std::size_t MacroPanel::country_years() const
{
    std::size_t n = 0;
    for (const auto& c : countries)
        n += c.rows.size();
    return n;
}

LoadResult load_panel(const std::filesystem::path& path, const LoadOptions& options)
{
    std::filesystem::path file = path;
    if (std::filesystem::is_directory(path))
        file = path / "macro_panel.csv";
    std::ifstream in(file);
    if (!in)
        throw DataError("cannot open panel file " + file.string());

    std::string line;
    if (!std::getline(in, line))
        throw DataError("empty panel file " + file.string());
    const auto header = split_csv_line(line);
    std::array<std::size_t, kColumns.size()> column_of{};
    for (std::size_t k = 0; k < kColumns.size(); ++k) {
        auto it = std::find(header.begin(), header.end(), kColumns[k]);
        if (it == header.end())
            throw DataError(fmt::format("missing required column '{}' in {}", kColumns[k], file.string()));
        column_of[k] = static_cast<std::size_t>(it - header.begin());
    }

    std::map<std::string, std::vector<RawRow>> by_country;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r")
            continue;
        const auto fields = split_csv_line(line);
        if (fields.size() < header.size())
            throw DataError(fmt::format("{}:{}: expected {} fields, got {}", file.string(), line_no,
                                        header.size(), fields.size()));
        RawRow raw;
        const auto& code = fields[column_of[0]];
        const auto year = parse_double(fields[column_of[1]]);
        if (code.empty() || !year)
            throw DataError(fmt::format("{}:{}: country and year are required", file.string(), line_no));
        raw.year = static_cast<int>(*year);
        for (std::size_t k = 0; k < raw.values.size(); ++k)
            raw.values[k] = parse_double(fields[column_of[k + 2]]);
        by_country[code].push_back(raw);
    }

    LoadResult result;
    for (auto& [code, rows] : by_country) {
        if (options.excluded.contains(code)) {
            result.report.push_back(fmt::format("excluded {} (limited data availability)", code));
            continue;
        }
        if (options.country_filter && !options.country_filter->contains(code)) {
            result.report.push_back(fmt::format("excluded {} (not in country filter)", code));
            continue;
        }
        std::sort(rows.begin(), rows.end(), [](const RawRow& a, const RawRow& b) { return a.year < b.year; });
        for (std::size_t k = 1; k < rows.size(); ++k)
            if (rows[k].year == rows[k - 1].year)
                throw DataError(fmt::format("{}: duplicate year {}", code, rows[k].year));

        auto first = std::find_if(rows.begin(), rows.end(), [](const RawRow& r) { return r.complete(); });
        if (first == rows.end()) {
            result.report.push_back(fmt::format("excluded {} (no complete year)", code));
            continue;
        }
        if (first != rows.begin())
            result.report.push_back(fmt::format("{}: dropped {} leading incomplete rows before {}", code,
                                                first - rows.begin(), first->year));

        CountrySeries series;
        series.country_code = code;
        series.first_year = first->year;
        int expected = first->year;
        for (auto it = first; it != rows.end(); ++it, ++expected) {
            if (it->year != expected)
                throw DataError(fmt::format("{}: year gap, {} missing", code, expected));
            if (!it->complete())
                throw DataError(fmt::format("{} {}: missing field after series start", code, it->year));
            auto state = to_state(*it);
            check_state(code, it->year, state);
            series.rows.push_back(state);
        }
        result.report.push_back(fmt::format("kept {} {}-{} ({} years)", code, series.first_year,
                                            series.last_year(), series.rows.size()));
        result.panel.countries.push_back(std::move(series));
    }
    if (result.panel.countries.empty())
        throw DataError("no countries left after exclusions and filter");
    return result;
}

void write_panel(const MacroPanel& panel, const std::filesystem::path& file)
{
    std::ofstream out(file);
    if (!out)
        throw DataError("cannot write " + file.string());
    for (std::size_t k = 0; k < kColumns.size(); ++k)
        out << (k ? "," : "") << kColumns[k];
    out << '\n';
    for (const auto& c : panel.countries) {
        for (std::size_t k = 0; k < c.rows.size(); ++k) {
            const auto& s = c.rows[k];
            out << fmt::format("{},{},{},{},{},{},{},{},{}\n", c.country_code, c.first_year + static_cast<int>(k),
                               s.stock_return, s.bond_return, s.housing_return, s.rental_yield, s.hpi,
                               s.inflation, s.wage_index);
        }
    }
}

MacroPanel rescale_hpi(MacroPanel panel, int anchor_year, double anchor_value, const std::string& reference_country)
{
    const CountrySeries* ref = panel.find(reference_country);
    if (!ref)
        throw DataError("HPI anchor country " + reference_country + " not in panel");
    if (!ref->contains(anchor_year))
        throw DataError(fmt::format("HPI anchor year {} not in {} series", anchor_year, reference_country));
    const double scale = anchor_value / ref->at_year(anchor_year).hpi;
    for (auto& c : panel.countries)
        for (auto& s : c.rows)
            s.hpi *= scale;
    panel.anchor_year = anchor_year;
    panel.anchor_value = anchor_value;
    return panel;
}

double to_real(double nominal_return, double inflation)
{
    return (1.0 + nominal_return) / (1.0 + inflation) - 1.0;
}

std::string panel_fingerprint(const MacroPanel& panel)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto mix = [&h](std::uint64_t v) {
        for (int b = 0; b < 8; ++b) {
            h ^= (v >> (8 * b)) & 0xffU;
            h *= 0x100000001b3ULL;
        }
    };
    for (const auto& c : panel.countries) {
        for (char ch : c.country_code)
            mix(static_cast<unsigned char>(ch));
        mix(static_cast<std::uint64_t>(c.first_year));
        for (const auto& s : c.rows)
            for (double v : {s.stock_return, s.bond_return, s.housing_return, s.rental_yield, s.hpi, s.inflation,
                             s.wage_index})
                mix(std::bit_cast<std::uint64_t>(v));
    }
    return fmt::format("{:016x}", h);
}

std::set<std::string> expand_country_list(const std::string& spec)
{
    static const std::map<std::string, std::set<std::string>> groups = {
        {"US", {"USA"}},
        {"UK", {"GBR"}},
        {"EUROPE", {"BEL", "DNK", "FIN", "FRA", "DEU", "IRL", "ITA", "NLD", "NOR", "PRT", "SWE", "CHE"}},
    };
    std::set<std::string> out;
    std::istringstream in(spec);
    std::string item;
    while (std::getline(in, item, ',')) {
        item.erase(std::remove(item.begin(), item.end(), ' '), item.end());
        if (item.empty())
            continue;
        std::string upper = item;
        std::transform(upper.begin(), upper.end(), upper.begin(), [](unsigned char ch) { return std::toupper(ch); });
        if (auto it = groups.find(upper); it != groups.end())
            out.insert(it->second.begin(), it->second.end());
        else
            out.insert(upper);
    }
    return out;
}

} // namespace homesim
