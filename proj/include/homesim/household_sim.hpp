#pragma once

#include <array>
#include <optional>
#include <vector>

#include "homesim/block_bootstrap.hpp"
#include "homesim/housing_finance.hpp"
#include "homesim/labor_income.hpp"
#include "homesim/metrics.hpp"
#include "homesim/mortality.hpp"

namespace homesim {

inline constexpr double kSavingRate = 0.10;
inline constexpr double kWithdrawalRate = 0.04;
inline constexpr double kLiquidationLtv = 1.5;
inline constexpr int kRetirementYear = kWorkingYears; // year index of age 65
inline constexpr int kRmLookaheadYears = 3;

/// A homeowner strategy: purchase trigger and financing of the first (and
/// optionally a second, rented-out) home.
struct Strategy
{
    double down_frac = 0.1;
    double threshold_frac = 0.1;
    bool allow_second_home = false;
    double second_down_frac = 0.1;
    double second_threshold_frac = 0.1;
    double pti_cap = 1.0 / 3.0;

    /// Financial assets needed, as a fraction of the home value, to buy.
    double trigger() const noexcept { return down_frac + threshold_frac; }
    double second_trigger() const noexcept { return second_down_frac + second_threshold_frac; }
};

struct SimulationParams
{
    double replacement = 0.45; // social security lambda
    const PlfTable* plf = nullptr;
    ReverseMortgageCosts rm_costs;
    UtilityParams utility;
    bool record_years = false;
};

/// Everything about one household that does not depend on the strategy:
/// its economy, its members' incomes and lifespans.
struct HouseholdEnvironment
{
    const EconomicPath* path = nullptr;
    LifespanPair lifespans;
    int years = 0;                         // simulated years, <= kLifeHorizon
    std::array<double, kLifeHorizon> labor{}; // household labor income by year
    std::array<double, kLifeHorizon> social_security{};
    std::array<int, kLifeHorizon> alive{};
};

HouseholdEnvironment make_environment(const EconomicPath& path, const IncomePath& male, const IncomePath& female,
                                      const LifespanPair& lifespans, double replacement);

/// Per-year accounting record. The cash-flow identity
///   labor + social_security + rent_income + ssi + rm_proceeds + sale_proceeds
///   = consumption + housing_costs + purchase_outlay + asset_flow
/// holds every year; asset_flow is the measured change of financial assets
/// between deflation and the return step.
struct YearRecord
{
    int age = 0;
    int alive = 0;
    double labor = 0.0, social_security = 0.0, rent_income = 0.0, ssi = 0.0;
    double rm_proceeds = 0.0, sale_proceeds = 0.0;
    double consumption = 0.0, housing_costs = 0.0, purchase_outlay = 0.0, asset_flow = 0.0;
    double rent_paid = 0.0, mortgage_paid = 0.0, maintenance = 0.0;
    double occupied_value = 0.0;
    double financial_assets = 0.0, housing_value = 0.0, wealth = 0.0;
    bool purchased = false, purchased_second = false, liquidated = false, defaulted = false;
    bool rm_originated = false, match_violation = false;

    /// Signed residual of the cash-flow identity.
    double budget_residual() const noexcept;
    /// Sum of absolute flows, the scale the residual is judged against.
    double budget_scale() const noexcept;
};

struct PurchaseInfo
{
    int year = -1;
    double household_income = 0.0;
    double hpi = 0.0;
    double bond_rate = 0.0;
    double mortgage_rate = 0.0;
    double home_value = 0.0;
};

/// Per-arm results of one simulated life.
struct ArmOutcome
{
    int years = 0;
    std::array<double, kLifeHorizon> wealth{};
    std::array<double, kLifeHorizon> financial{};
    std::array<double, kLifeHorizon> consumption{};
    std::array<double, kLifeHorizon> occupied_value{};
    std::array<int, kLifeHorizon> alive{};

    std::optional<PurchaseInfo> purchase;
    std::optional<PurchaseInfo> second_purchase;
    bool reached_retirement = false;
    double wealth_at_retirement = 0.0;
    double financial_at_retirement = 0.0;
    double terminal_wealth = 0.0;
    double terminal_financial = 0.0;

    double utility_pre = 0.0;  // consumption terms before 65
    double utility_post = 0.0; // consumption terms from 65
    double utility_bequest = 0.0;

    int liquidations = 0, defaults = 0, rm_originations = 0;
    int match_violations = 0;

    std::vector<YearRecord> records; // filled when SimulationParams::record_years

    double mdd_lifetime() const;
    double mdd_pre() const;
    /// nullopt when the household did not live into retirement.
    std::optional<double> mdd_post() const;
};

struct PurchaseDecision
{
    bool buy = false;
    double home_value = 0.0;
    Mortgage mortgage;
    double outlay = 0.0; // down payment + transaction cost
};

/// Purchase rule: buy when financial assets reach (down + threshold) of the
/// home value hpi * household labor income and the mortgage payment is at
/// most pti_cap of that income.
PurchaseDecision try_purchase(double financial_assets, double down_frac, double threshold_frac, double pti_cap,
                              double hpi, double household_income, double bond_rate);

/// Retired consumption target: the greater of 4% of current financial wealth
/// and 4% of financial wealth at retirement. Retirement income and housing
/// costs flow through financial assets.
double retirement_withdrawal(double financial_assets, double floor_withdrawal);

/// Three-year lookahead with flat income and zero asset returns; each year
/// assets gain income minus obligations minus the consumption target.
struct RmProjection
{
    double financial_assets = 0.0;
    double floor_withdrawal = 0.0;
    double annual_income = 0.0;      // social security + rent received
    double annual_obligations = 0.0; // mortgage, maintenance
    double minimum_consumption = 0.0;
};

/// True when the projection runs out of money strictly before covering
/// kRmLookaheadYears of spending.
bool should_take_reverse_mortgage(const RmProjection& projection);

enum class LiquidationReason { none, ltv, liquidity };

/// Liquidation rule for one home: LTV above 1.5, or liquid resources
/// (assets + income - housing obligations) below the minimum consumption.
LiquidationReason should_liquidate(const Home& home, double liquid_resources, double minimum_consumption);

/// Outcome of settling a renter's year: consumption, new assets and SSI.
struct Settlement
{
    double consumption = 0.0;
    double assets = 0.0;
    double ssi = 0.0;
};

/// Fund `target` consumption from assets + net income; below the minimum
/// consumption SSI tops the household up.
Settlement settle_renter(double assets, double net_income, double target, double minimum);

/// Homeowner arm of one household.
ArmOutcome simulate_owner(const HouseholdEnvironment& env, const Strategy& strategy, const SimulationParams& params);

/// All-equity renter whose working-life consumption replicates `owner`.
ArmOutcome simulate_benchmark(const HouseholdEnvironment& env, const ArmOutcome& owner,
                              const SimulationParams& params);

struct PairedOutcome
{
    ArmOutcome owner;
    ArmOutcome renter;
};

PairedOutcome simulate_pair(const HouseholdEnvironment& env, const Strategy& strategy, const SimulationParams& params);

/// Household net worth: financial assets plus each home's sale value net of
/// costs and loans, floored at zero per home.
double net_worth(double financial_assets, const std::vector<Home>& homes,
                 const std::optional<ReverseMortgage>& reverse_mortgage);

} // namespace homesim
