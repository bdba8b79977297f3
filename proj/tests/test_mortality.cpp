#include <doctest.h>

#include "homesim/mortality.hpp"
#include "test_support.hpp"

using namespace homesim;
using testsupport::TempDir;

namespace {

const std::filesystem::path kData = HOMESIM_DATA_DIR;

std::string table_text(double q, int skip_age = -1, double q_at_100 = -1.0)
{
    std::string text = "sex,age,death_probability\n";
    for (const char* sex : {"male", "female"})
        for (int age = 0; age <= 119; ++age) {
            if (age == skip_age)
                continue;
            const double v = (age == 100 && q_at_100 >= 0.0) ? q_at_100 : q;
            text += std::string(sex) + "," + std::to_string(age) + "," + std::to_string(v) + "\n";
        }
    return text;
}

} // namespace

TEST_CASE("shipped life table covers both sexes with q(100) = 1")
{
    const auto table = load_life_table(kData / "life_table.csv");
    for (Sex sex : {Sex::male, Sex::female}) {
        CHECK(table.q(sex, 100) == 1.0);
        for (int age = 25; age < 100; ++age) {
            CHECK(table.q(sex, age) >= 0.0);
            CHECK(table.q(sex, age) < 1.0);
        }
    }
}

TEST_CASE("loader caps q at 100 and rejects missing working ages")
{
    TempDir dir("life");
    testsupport::write_text(dir / "t.csv", table_text(0.01, -1, 0.3));
    CHECK(load_life_table(dir / "t.csv").q(Sex::female, 100) == 1.0);

    testsupport::write_text(dir / "t.csv", table_text(0.01, 60));
    CHECK_THROWS_AS(load_life_table(dir / "t.csv"), DataError);

    testsupport::write_text(dir / "t.csv", "sex,age\nmale,25\n");
    CHECK_THROWS_AS(load_life_table(dir / "t.csv"), DataError);
}

TEST_CASE("degenerate tables give the extreme lifespans")
{
    Xoshiro256 rng(1);
    const auto certain = LifeTable::constant(1.0);
    const auto never = LifeTable::constant(0.0);
    for (int k = 0; k < 100; ++k) {
        CHECK(simulate_lifespan(Sex::male, certain, rng) == 25);
        CHECK(simulate_lifespan(Sex::female, never, rng) == 100);
    }
}

TEST_CASE("mean death age and survival curve match the table")
{
    const auto table = load_life_table(kData / "life_table.csv");
    constexpr int n = 1'000'000;
    Xoshiro256 rng(77);
    std::array<long, 102> deaths{};
    double sum = 0.0;
    for (int k = 0; k < n; ++k) {
        const int age = simulate_lifespan(Sex::female, table, rng);
        sum += age;
        ++deaths[static_cast<std::size_t>(age)];
    }
    // Closed-form expectation, computed here from the q vector.
    double alive = 1.0, expected = 0.0;
    for (int a = 25; a <= 99; ++a) {
        expected += alive * table.q(Sex::female, a) * a;
        alive *= 1.0 - table.q(Sex::female, a);
    }
    expected += alive * 100.0;
    CHECK(sum / n == doctest::Approx(expected).epsilon(0.5 / expected));
    CHECK(table.expected_death_age(Sex::female) == doctest::Approx(expected).epsilon(1e-12));

    long survivors = n;
    double analytic = 1.0;
    for (int a = 25; a <= 99; ++a) {
        // Where survival is still sizeable the sample error is below 0.5%.
        if (analytic > 0.05)
            CHECK(static_cast<double>(survivors) / n == doctest::Approx(analytic).epsilon(0.005));
        CHECK(table.survival(Sex::female, a) == doctest::Approx(analytic).epsilon(1e-12));
        survivors -= deaths[static_cast<std::size_t>(a)];
        analytic *= 1.0 - table.q(Sex::female, a);
    }
}

TEST_CASE("alive count and household length")
{
    const LifespanPair pair{70, 85};
    CHECK(alive_count(60, pair) == 2);
    CHECK(alive_count(70, pair) == 2); // death happens at year-end
    CHECK(alive_count(71, pair) == 1);
    CHECK(alive_count(86, pair) == 0);
    CHECK(pair.household_end_age() == 85);
    CHECK(pair.household_years() == 61);

    CHECK(LifespanPair{25, 25}.household_years() == 1);
    CHECK(LifespanPair{100, 40}.household_years() == 75);
    CHECK(alive_count(99, LifespanPair{100, 100}) == 2);
}
