#include <doctest.h>

#include <numeric>

#include "homesim/macro_panel.hpp"
#include "test_support.hpp"

using namespace homesim;
using testsupport::TempDir;

namespace {

const std::filesystem::path kData = HOMESIM_DATA_DIR;

std::string row(const std::string& code, int year, double hpi = 100.0)
{
    return code + "," + std::to_string(year) + ",0.08,0.04,0.05,0.04," + std::to_string(hpi) + ",0.02,100\n";
}

} // namespace

TEST_CASE("to_real deflates a nominal return")
{
    CHECK(to_real(0.10, 0.00) == doctest::Approx(0.10).epsilon(1e-15));
    CHECK(to_real(0.05, 0.05) == doctest::Approx(0.0).epsilon(1e-15));
    // (1.1124 / 1.03) - 1 = 0.08 exactly.
    CHECK(to_real(0.1124, 0.03) == doctest::Approx(0.08).epsilon(1e-12));
}

TEST_CASE("shipped panel keeps 16 countries after default exclusions")
{
    const auto loaded = load_panel(kData);
    CHECK(loaded.panel.countries.size() == 16);
    CHECK(loaded.panel.find("CAN") == nullptr);
    CHECK(loaded.panel.find("IRL") == nullptr);
    CHECK_FALSE(loaded.report.empty());
}

TEST_CASE("country filter keeps only the requested series")
{
    LoadOptions options;
    options.country_filter = expand_country_list("US");
    const auto loaded = load_panel(kData, options);
    REQUIRE(loaded.panel.countries.size() == 1);
    CHECK(loaded.panel.countries[0].country_code == "USA");

    CHECK(expand_country_list("UK,US") == std::set<std::string>{"GBR", "USA"});
    CHECK(expand_country_list("EUROPE").size() == 12);
}

TEST_CASE("pooled nominal means of the shipped panel")
{
    const auto panel = load_panel(kData).panel;
    double stock = 0.0, house = 0.0;
    std::size_t n = 0;
    for (const auto& c : panel.countries)
        for (const auto& s : c.rows) {
            stock += s.stock_return;
            house += s.housing_return;
            ++n;
        }
    CHECK(stock / static_cast<double>(n) == doctest::Approx(0.1124).epsilon(0.005 / 0.1124));
    CHECK(house / static_cast<double>(n) == doctest::Approx(0.0729).epsilon(0.005 / 0.0729));
}

TEST_CASE("every retained series is gap-free with valid fields")
{
    for (const auto& c : load_panel(kData).panel.countries) {
        CHECK(c.rows.size() > 0);
        for (const auto& s : c.rows) {
            CHECK(s.rental_yield >= 0.0);
            CHECK(s.hpi > 0.0);
            CHECK(s.stock_return > -1.0);
            CHECK(s.bond_return > -1.0);
            CHECK(s.housing_return > -1.0);
        }
    }
}

TEST_CASE("a year gap inside a series is a data error naming country and year")
{
    TempDir dir("gap");
    testsupport::write_text(dir / "macro_panel.csv",
                            std::string(testsupport::kPanelHeader) + row("USA", 1870) + row("USA", 1872));
    try {
        load_panel(dir.path());
        FAIL("expected a DataError");
    } catch (const DataError& e) {
        const std::string what = e.what();
        CHECK(what.find("USA") != std::string::npos);
        CHECK(what.find("1871") != std::string::npos);
    }
}

TEST_CASE("a missing column is a data error naming the column")
{
    TempDir dir("column");
    testsupport::write_text(dir / "macro_panel.csv",
                            "country,year,stock_return,bond_return,housing_return,hpi,inflation,wage_index\n"
                            "USA,1870,0.1,0.04,0.05,100,0.02,100\n");
    try {
        load_panel(dir.path());
        FAIL("expected a DataError");
    } catch (const DataError& e) {
        CHECK(std::string(e.what()).find("rental_yield") != std::string::npos);
    }
}

TEST_CASE("leading incomplete rows are dropped, later ones are errors")
{
    TempDir dir("leading");
    const std::string blank = "USA,1869,,,,,,,\n";
    testsupport::write_text(dir / "macro_panel.csv",
                            std::string(testsupport::kPanelHeader) + blank + row("USA", 1870) + row("USA", 1871));
    const auto loaded = load_panel(dir.path());
    REQUIRE(loaded.panel.countries.size() == 1);
    CHECK(loaded.panel.countries[0].first_year == 1870);
    CHECK(loaded.panel.countries[0].rows.size() == 2);

    testsupport::write_text(dir / "macro_panel.csv", std::string(testsupport::kPanelHeader) + row("USA", 1870) +
                                                         "USA,1871,,,,,,,\n" + row("USA", 1872));
    CHECK_THROWS_AS(load_panel(dir.path()), DataError);
}

TEST_CASE("rescale_hpi applies one scalar anchored on the US")
{
    TempDir dir("rescale");
    testsupport::write_text(dir / "macro_panel.csv", std::string(testsupport::kPanelHeader) + row("FRA", 1990, 80.0) +
                                                         row("FRA", 1991, 90.0) + row("USA", 1990, 100.0) +
                                                         row("USA", 1991, 110.0));
    const auto before = load_panel(dir.path()).panel;
    const auto after = rescale_hpi(before, 1990, 4.14);

    const auto& us = *after.find("USA");
    CHECK(us.at_year(1990).hpi == doctest::Approx(4.14).epsilon(1e-14));
    // Scalar 0.0414 everywhere.
    CHECK(after.find("FRA")->at_year(1990).hpi == doctest::Approx(80.0 * 0.0414).epsilon(1e-14));

    const auto& us0 = *before.find("USA");
    CHECK(us.at_year(1990).hpi / us.at_year(1991).hpi ==
          doctest::Approx(us0.at_year(1990).hpi / us0.at_year(1991).hpi).epsilon(1e-14));

    // Re-anchoring to the value already achieved is the identity.
    const auto again = rescale_hpi(after, 1990, 4.14);
    for (std::size_t c = 0; c < after.countries.size(); ++c)
        for (std::size_t k = 0; k < after.countries[c].rows.size(); ++k)
            CHECK(again.countries[c].rows[k].hpi == after.countries[c].rows[k].hpi);

    CHECK_THROWS_AS(rescale_hpi(before, 1950, 4.14), DataError);
}

TEST_CASE("writing and reloading the panel is bit-exact")
{
    TempDir dir("roundtrip");
    const auto original = load_panel(kData).panel;
    write_panel(original, dir / "macro_panel.csv");
    LoadOptions keep_all;
    keep_all.excluded.clear();
    const auto reloaded = load_panel(dir / "macro_panel.csv", keep_all).panel;

    REQUIRE(reloaded.countries.size() == original.countries.size());
    CHECK(panel_fingerprint(reloaded) == panel_fingerprint(original));
    for (std::size_t c = 0; c < original.countries.size(); ++c) {
        const auto& a = original.countries[c];
        const auto& b = reloaded.countries[c];
        REQUIRE(a.rows.size() == b.rows.size());
        for (std::size_t k = 0; k < a.rows.size(); ++k) {
            CHECK(a.rows[k].stock_return == b.rows[k].stock_return);
            CHECK(a.rows[k].hpi == b.rows[k].hpi);
            CHECK(a.rows[k].wage_index == b.rows[k].wage_index);
        }
    }
}
