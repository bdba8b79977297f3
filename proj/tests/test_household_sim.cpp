#include <doctest.h>

#include "homesim/engine.hpp"
#include "homesim/household_sim.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

using namespace homesim;

namespace {

const std::filesystem::path kData = HOMESIM_DATA_DIR;

IncomePath flat_income(double income)
{
    IncomePath p;
    p.years.assign(kWorkingYears, IncomeYear{income, 0.0, 0.0, 0.0});
    return p;
}

const ModelInputs& shared_inputs()
{
    static const ModelInputs inputs = [] {
        RunConfig config;
        config.data_dir = kData;
        return load_inputs(config);
    }();
    return inputs;
}

void check_invariants(const ArmOutcome& arm)
{
    REQUIRE(arm.records.size() == static_cast<std::size_t>(arm.years));
    for (const auto& r : arm.records) {
        CHECK(std::abs(r.budget_residual()) <= 1e-9 * std::max(1.0, r.budget_scale()));
        CHECK(r.financial_assets >= 0.0);
        CHECK(r.consumption >= minimum_consumption(r.alive) * (1.0 - 1e-12));
    }
}

} // namespace

TEST_CASE("purchase trigger and payment-to-income cap")
{
    // H = 0.3 * 100,000; trigger 0.30 H = 9,000.
    CHECK_FALSE(try_purchase(0.29 * 30'000.0, 0.1, 0.2, 1.0 / 3, 0.3, 100'000.0, 0.03).buy);
    const auto ok = try_purchase(0.3001 * 30'000.0, 0.1, 0.2, 1.0 / 3, 0.3, 100'000.0, 0.03);
    CHECK(ok.buy);
    CHECK(ok.home_value == doctest::Approx(30'000.0));
    CHECK(ok.outlay == doctest::Approx(0.13 * 30'000.0));
    CHECK(ok.mortgage.principal == doctest::Approx(27'000.0));

    const auto cash = try_purchase(1.1 * 30'000.0, 1.0, 0.1, 1.0 / 3, 0.3, 100'000.0, 0.03);
    CHECK(cash.buy);
    CHECK_FALSE(cash.mortgage.active());
    CHECK(cash.outlay == doctest::Approx(1.03 * 30'000.0));

    // H = 6.1 * 45,000 = 274,500 at 5%: payment about 16,071 against a 15,000 cap.
    const double payment = oracles::annuity_payment_bisect(0.9 * 274'500.0, 0.05, 30);
    CHECK(payment > 16'000.0);
    CHECK_FALSE(try_purchase(1e7, 0.1, 0.1, 1.0 / 3, 6.1, 45'000.0, 0.0315).buy);
    CHECK(try_purchase(1e7, 0.1, 0.1, 0.4, 6.1, 45'000.0, 0.0315).buy);

    CHECK_FALSE(try_purchase(1e7, 0.1, 0.1, 1.0 / 3, 3.0, 0.0, 0.03).buy);
}

TEST_CASE("retirement withdrawal follows the 4% rule with a floor")
{
    const double floor = 0.04 * 1'000'000.0;
    CHECK(floor == doctest::Approx(40'000.0));
    CHECK(retirement_withdrawal(500'000.0, floor) == doctest::Approx(40'000.0));
    CHECK(retirement_withdrawal(1'500'000.0, floor) == doctest::Approx(60'000.0));
}

TEST_CASE("reverse mortgage lookahead")
{
    const double need = 30'000.0;
    CHECK_FALSE(should_take_reverse_mortgage({10 * need, need, 0.0, 0.0, need}));
    CHECK(should_take_reverse_mortgage({1 * need, need, 0.0, 0.0, need}));
    CHECK_FALSE(should_take_reverse_mortgage({3 * need, need, 0.0, 0.0, need}));
    CHECK(should_take_reverse_mortgage({3 * need - 1.0, need, 0.0, 0.0, need}));
    // Income and obligations enter the projection.
    CHECK_FALSE(should_take_reverse_mortgage({0.0, need, need, 0.0, need}));
    CHECK(should_take_reverse_mortgage({3 * need, need, 0.0, 1'000.0, need}));
}

TEST_CASE("liquidation rule")
{
    Home home{100'000.0, true, {}};
    home.mortgage.balance = 160'000.0;
    CHECK(should_liquidate(home, 1e9, 16'980.0) == LiquidationReason::ltv);
    home.mortgage.balance = 149'000.0;
    CHECK(should_liquidate(home, 1e9, 16'980.0) == LiquidationReason::none);
    CHECK(should_liquidate(home, 8'000.0, minimum_consumption(2)) == LiquidationReason::liquidity);
}

TEST_CASE("renter settlement and SSI")
{
    const auto rich = settle_renter(50'000.0, 10'000.0, 40'000.0, 16'980.0);
    CHECK(rich.consumption == 40'000.0);
    CHECK(rich.assets == 20'000.0);
    CHECK(rich.ssi == 0.0);

    const auto tight = settle_renter(5'000.0, 15'000.0, 40'000.0, 16'980.0);
    CHECK(tight.consumption == 20'000.0);
    CHECK(tight.assets == 0.0);

    const auto poor = settle_renter(0.0, 5'000.0, 40'000.0, 11'316.0);
    CHECK(poor.consumption == 11'316.0);
    CHECK(poor.ssi == 6'316.0);
    CHECK(poor.assets == 0.0);
}

TEST_CASE("hand-worked five-year trajectory")
{
    MarketState m;
    m.stock_return = 0.05;
    m.bond_return = 0.03;
    m.housing_return = 0.02;
    m.rental_yield = 0.04;
    m.hpi = 0.3;
    m.inflation = 0.0;
    const auto path = testsupport::constant_path(m);
    const auto env = make_environment(path, flat_income(60'000.0), flat_income(40'000.0), {29, 29}, 0.45);
    REQUIRE(env.years == 5);

    SimulationParams params;
    params.record_years = true;
    const Strategy strategy{0.1, 0.1};
    const auto pair = simulate_pair(env, strategy, params);

    // Owner: rents at 0.04 * 30,000 in year 0, buys H = 30,000 in year 1
    // once assets exceed 0.2 H = 6,000, then pays P + 2.5% of H yearly.
    const double y = 100'000.0;
    const double payment = oracles::annuity_payment_bisect(27'000.0, 0.0485, 30);
    double a_own = 0.0, a_rent = 0.0, home = 0.0, balance = 0.0;
    std::array<double, 5> w_own{}, w_rent{}, c_own{};
    for (int t = 0; t < 5; ++t) {
        double costs = 0.0;
        if (t == 0) {
            costs = 0.04 * 30'000.0;
        } else {
            if (t == 1) {
                home = 30'000.0;
                balance = 27'000.0;
                a_own -= 0.13 * 30'000.0;
            }
            costs = payment + 0.025 * home;
        }
        const double consumption = 0.9 * (y - costs);
        a_own += y - costs - consumption;
        balance = balance * 1.0485 - (t >= 1 ? payment : 0.0);
        a_own *= 1.05;
        const double occupied = t == 0 ? 30'000.0 : home;
        home *= 1.02;
        w_own[static_cast<std::size_t>(t)] = a_own + (t >= 1 ? 0.97 * home - balance : 0.0);
        c_own[static_cast<std::size_t>(t)] = consumption;

        a_rent += y - 0.04 * occupied - consumption;
        a_rent *= 1.05;
        w_rent[static_cast<std::size_t>(t)] = a_rent;
    }

    CHECK(pair.owner.purchase.has_value());
    CHECK(pair.owner.purchase->year == 1);
    CHECK(pair.owner.wealth[0] == doctest::Approx(10'374.0).epsilon(1e-12));
    CHECK(pair.owner.consumption[0] == doctest::Approx(88'920.0).epsilon(1e-12));
    for (std::size_t t = 0; t < 5; ++t) {
        CHECK(pair.owner.wealth[t] == doctest::Approx(w_own[t]).epsilon(1e-10));
        CHECK(pair.owner.consumption[t] == doctest::Approx(c_own[t]).epsilon(1e-12));
        CHECK(pair.renter.consumption[t] == doctest::Approx(c_own[t]).epsilon(1e-12));
        CHECK(pair.renter.wealth[t] == doctest::Approx(w_rent[t]).epsilon(1e-10));
    }
    CHECK(pair.owner.terminal_wealth == doctest::Approx(w_own[4]).epsilon(1e-10));
    CHECK(pair.renter.match_violations == 0);
    CHECK_FALSE(pair.owner.reached_retirement);
    check_invariants(pair.owner);
    check_invariants(pair.renter);
}

TEST_CASE("inflation erodes the real burden of a nominal mortgage")
{
    MarketState m;
    m.stock_return = 0.05;
    m.bond_return = 0.03;
    m.housing_return = 0.02;
    m.rental_yield = 0.04;
    m.hpi = 0.3;
    m.inflation = 0.02;
    const auto path = testsupport::constant_path(m);
    const auto env = make_environment(path, flat_income(60'000.0), flat_income(40'000.0), {29, 29}, 0.45);

    SimulationParams params;
    params.record_years = true;
    const auto pair = simulate_pair(env, Strategy{0.1, 0.1}, params);
    REQUIRE(pair.owner.purchase.has_value());
    REQUIRE(pair.owner.purchase->year == 1);

    // The loan rate is the nominal yield plus spread; the level payment is
    // fixed in dollars, so its real value falls by 1/(1+inflation) each year.
    CHECK(pair.owner.purchase->mortgage_rate == doctest::Approx(0.0485));
    const double payment = oracles::annuity_payment_bisect(27'000.0, 0.0485, 30);
    for (std::size_t t = 1; t < 5; ++t)
        CHECK(pair.owner.records[t].mortgage_paid ==
              doctest::Approx(payment / std::pow(1.02, static_cast<double>(t - 1))).epsilon(1e-12));
}

TEST_CASE("returns apply to assets and homes after the year's flows")
{
    MarketState m;
    m.stock_return = 0.10;
    m.housing_return = 0.05;
    m.hpi = 0.3;
    const auto path = testsupport::constant_path(m);
    const auto env = make_environment(path, flat_income(60'000.0), flat_income(40'000.0), {35, 35}, 0.45);
    SimulationParams params;
    params.record_years = true;
    const auto owner = simulate_owner(env, Strategy{1.0, 0.1}, params);
    REQUIRE(owner.purchase.has_value());
    const auto& r = owner.records;
    for (std::size_t t = 1; t < r.size(); ++t) {
        CHECK(r[t].financial_assets == doctest::Approx((r[t - 1].financial_assets + r[t].asset_flow) * 1.10));
        if (static_cast<int>(t) > owner.purchase->year)
            CHECK(r[t].housing_value == doctest::Approx(r[t - 1].housing_value * 1.05));
    }
}

TEST_CASE("a strategy that never buys reproduces the benchmark exactly")
{
    const auto& inputs = shared_inputs();
    RunConfig config;
    const auto params = simulation_params(inputs, config);
    for (std::uint64_t h = 0; h < 50; ++h) {
        const auto draw = draw_household(inputs, 1, h);
        const auto env = make_environment(draw.path, draw.male, draw.female, draw.lifespans, 0.45);
        const auto pair = simulate_pair(env, Strategy{0.1, 1e9}, params);
        CHECK_FALSE(pair.owner.purchase.has_value());
        for (int t = 0; t < env.years; ++t) {
            const auto k = static_cast<std::size_t>(t);
            CHECK(pair.owner.wealth[k] == pair.renter.wealth[k]);
            CHECK(pair.owner.consumption[k] == pair.renter.consumption[k]);
        }
        CHECK(pair.owner.terminal_wealth == pair.renter.terminal_wealth);
    }
}

TEST_CASE("both arms agree bit for bit before the purchase")
{
    const auto& inputs = shared_inputs();
    RunConfig config;
    const auto params = simulation_params(inputs, config);
    int checked = 0;
    for (std::uint64_t h = 0; h < 300; ++h) {
        const auto draw = draw_household(inputs, 2, h);
        const auto env = make_environment(draw.path, draw.male, draw.female, draw.lifespans, 0.45);
        const auto pair = simulate_pair(env, Strategy{0.2, 0.3}, params);
        if (!pair.owner.purchase)
            continue;
        ++checked;
        for (int t = 0; t < pair.owner.purchase->year; ++t) {
            const auto k = static_cast<std::size_t>(t);
            CHECK(pair.owner.wealth[k] == pair.renter.wealth[k]);
            CHECK(pair.owner.financial[k] == pair.renter.financial[k]);
            CHECK(pair.owner.consumption[k] == pair.renter.consumption[k]);
        }
    }
    CHECK(checked > 0);
}

TEST_CASE("budget identity, consumption match and floors on drawn households")
{
    const auto& inputs = shared_inputs();
    RunConfig config;
    auto params = simulation_params(inputs, config);
    params.record_years = true;
    const std::vector<Strategy> strategies{
        {0.1, 0.1}, {0.5, 0.5}, {1.0, 0.3}, {0.1, 0.1, true, 0.1, 0.1}, {0.1, 0.1, true, 1.0, 0.3}};
    for (std::uint64_t h = 0; h < 100; ++h) {
        const auto draw = draw_household(inputs, 3, h);
        const auto env = make_environment(draw.path, draw.male, draw.female, draw.lifespans, 0.45);
        for (const auto& s : strategies) {
            const auto pair = simulate_pair(env, s, params);
            check_invariants(pair.owner);
            check_invariants(pair.renter);
            for (int t = 0; t < std::min(env.years, kRetirementYear); ++t) {
                const auto& rec = pair.renter.records[static_cast<std::size_t>(t)];
                if (!rec.match_violation)
                    CHECK(testsupport::close_rel(rec.consumption, pair.owner.consumption[static_cast<std::size_t>(t)],
                                                 1e-9));
            }
        }
    }
}

TEST_CASE("a retiree short of cash takes a reverse mortgage before selling")
{
    MarketState m;
    m.stock_return = 0.0;
    m.bond_return = 0.02;
    m.housing_return = 0.03;
    m.rental_yield = 0.04;
    m.hpi = 1.0;
    const auto path = testsupport::constant_path(m);
    const auto env = make_environment(path, flat_income(50'000.0), flat_income(50'000.0), {100, 100}, 0.1);
    const auto plf = load_plf_table(kData / "plf_table.csv");
    SimulationParams params;
    params.plf = &plf;
    params.record_years = true;
    const auto owner = simulate_owner(env, Strategy{1.0, 0.1}, params);
    REQUIRE(owner.purchase.has_value());
    CHECK(owner.rm_originations == 1);

    int rm_year = -1, sale_year = -1;
    for (const auto& r : owner.records) {
        if (r.rm_originated && rm_year < 0)
            rm_year = r.age;
        if (r.liquidated && sale_year < 0)
            sale_year = r.age;
    }
    REQUIRE(rm_year >= kRetirementAge);
    if (sale_year >= 0)
        CHECK(sale_year > rm_year);
    check_invariants(owner);
}

TEST_CASE("environment assembles incomes from living members")
{
    MarketState m;
    const auto path = testsupport::constant_path(m);
    const auto env = make_environment(path, flat_income(60'000.0), flat_income(40'000.0), {40, 70}, 0.45);
    CHECK(env.years == 46);
    CHECK(env.labor[0] == 100'000.0);
    CHECK(env.labor[15] == 100'000.0);  // age 40, male's last year
    CHECK(env.labor[16] == 40'000.0);
    CHECK(env.social_security[40] == doctest::Approx(0.45 * 40'000.0));
    CHECK(env.alive[16] == 1);

    const auto short_path = testsupport::constant_path(m, 10);
    CHECK_THROWS(make_environment(short_path, flat_income(1.0), flat_income(1.0), {60, 60}, 0.45));
}
