#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <vector>

namespace homesim {

inline constexpr double kMortgageSpread = 0.0185;
inline constexpr double kReverseMortgageSpread = 0.0335;
inline constexpr double kMaintenanceRate = 0.025;
inline constexpr double kTransactionCost = 0.03;
inline constexpr int kMortgageTerm = 30;

/// Raised when a housing-finance transition is requested in a state that
/// does not allow it.
class HousingError : public std::logic_error
{
public:
    using std::logic_error::logic_error;
};

/// 30-year fixed-rate level-payment mortgage, annual payments.
struct Mortgage
{
    double principal = 0.0;
    double balance = 0.0;
    double rate = 0.0;
    double annual_payment = 0.0;
    int remaining_term = 0;

    bool active() const noexcept { return balance > 0.0; }
};

struct Home
{
    double value = 0.0;
    bool is_primary = true;
    Mortgage mortgage;

    double maintenance() const noexcept { return kMaintenanceRate * value; }
    double ltv() const noexcept { return value > 0.0 ? mortgage.balance / value : 0.0; }
};

/// Lump-sum fixed-rate reverse mortgage on the primary residence.
struct ReverseMortgage
{
    double limit = 0.0;   // gross principal limit at origination
    double balance = 0.0; // accrues at `rate`, no payments until termination
    double rate = 0.0;
    int origination_age = 0;

    /// Non-recourse payoff at termination given the home's net sale value.
    double repayment(double available_equity) const noexcept;
};

/// Level annual payment of a fully amortizing loan.
double annuity_payment(double principal, double rate, int term);

/// Mortgage on (1 - down_frac) * home_value at bond_rate + spread.
/// down_frac == 1 gives an inactive zero-balance mortgage.
Mortgage originate_mortgage(double home_value, double down_frac, double bond_rate,
                            double spread = kMortgageSpread);

/// One year: balance * (1 + r) - payment, floored at zero with the final
/// payment reduced to the payoff amount.
Mortgage amortize_year(Mortgage m);

/// Payment actually due this year (the payoff amount in the final year).
double payment_due(const Mortgage& m) noexcept;

/// Principal limit factors by youngest-borrower age and expected rate.
class PlfTable
{
public:
    PlfTable(std::vector<int> ages, std::vector<double> rates, std::vector<std::vector<double>> values);

    /// Bilinear interpolation on the grid, clamped at the edges.
    double lookup(double age, double rate) const;

    const std::vector<int>& ages() const noexcept { return ages_; }
    const std::vector<double>& rates() const noexcept { return rates_; }
    double at(std::size_t age_index, std::size_t rate_index) const { return values_.at(age_index).at(rate_index); }

private:
    std::vector<int> ages_;
    std::vector<double> rates_;
    std::vector<std::vector<double>> values_; // [age][rate]
};

/// CSV with columns age, rate, plf forming a complete grid.
PlfTable load_plf_table(const std::filesystem::path& file);

double plf_lookup(double age, double rate, const PlfTable& table);

struct ReverseMortgageCosts
{
    double fraction_of_value = 0.02;
    double flat = 2500.0;
};

struct ReverseMortgageOrigination
{
    ReverseMortgage loan;
    double lump_sum = 0.0; // proceeds net of origination costs
};

/// Originate the maximum lump-sum reverse mortgage on the primary home.
/// The PLF is looked up at the loan's expected rate (bond rate + spread).
ReverseMortgageOrigination originate_reverse_mortgage(const Home& home, int age, double bond_rate,
                                                      const PlfTable& table,
                                                      const std::optional<ReverseMortgage>& existing = std::nullopt,
                                                      const ReverseMortgageCosts& costs = {});

/// Net cash from selling `home`: 97% of value less the mortgage balance less
/// the (non-recourse) reverse-mortgage payoff. Can be negative.
double sale_pnl(const Home& home, double mortgage_balance, double rm_balance);

} // namespace homesim
