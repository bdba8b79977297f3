#pragma once

#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace homesim {

struct UtilityParams
{
    double risk_aversion = 3.84;        // delta
    double bequest_intensity = 2360.0;  // a_q
    double bequest_curvature = 490000.0; // b_q, 2024 USD
};

/// CRRA flow utility of household consumption with the sqrt(N) equivalence scale.
double consumption_utility(double consumption, int alive, const UtilityParams& params = {});

/// a_q (W + b_q)^(1 - delta) / (1 - delta).
double bequest_utility(double terminal_wealth, const UtilityParams& params = {});

enum class Window { pre_retirement, post_retirement, lifetime };

struct UtilityComponents
{
    double consumption_utility = 0.0;
    double bequest_utility = 0.0;
    double total = 0.0;
    double equivalent_wealth = 0.0;
};

/// Sum of per-year CRRA terms over `window` plus the bequest term when the
/// window contains the household's death. `first_retirement_year` is the
/// year index of age 65. Non-positive consumption is a std::domain_error.
UtilityComponents utility_of_path(std::span<const double> consumption, std::span<const int> alive,
                                  double terminal_wealth, Window window, int first_retirement_year = 40,
                                  const UtilityParams& params = {});

/// Wealth whose one-shot CRRA value equals `utility`: ((1 - delta) U)^(1 / (1 - delta)).
/// Requires U < 0 when delta > 1.
double equivalent_wealth(double utility, const UtilityParams& params = {});

/// owner_mean / renter_mean - 1.
double wealth_change(double owner_mean, double renter_mean);

/// Largest peak-to-trough fractional decline of a non-negative path.
double max_drawdown(std::span<const double> wealth_path);

/// Mean absolute pairwise difference over twice the mean, via the sorted
/// rank identity. Requires non-negative values with positive sum.
double gini(std::vector<double> wealths);

/// Direct O(n^2) definition, kept for cross-checking.
double gini_pairwise(std::span<const double> wealths);

/// Values at the given percentiles (0-100) using the nearest-rank rule on
/// the sorted sample.
std::vector<double> percentile_edges(std::vector<double> keys, std::span<const double> percentiles);

/// One row per bracket [edge_k, edge_{k+1}); last bracket closed above.
struct BracketRow
{
    std::string label;
    std::size_t count = 0;
    std::optional<double> wealth_change_retirement;
    std::optional<double> wealth_change_death;
    std::optional<double> welfare_change_post;
    std::optional<double> welfare_change_lifetime;
};

/// Per-household inputs to a bracket report.
struct BracketObservation
{
    double key = 0.0;
    bool reached_retirement = false;
    double owner_wealth_retirement = 0.0, renter_wealth_retirement = 0.0;
    double owner_wealth_death = 0.0, renter_wealth_death = 0.0;
    double owner_v_post = 0.0, renter_v_post = 0.0;
    double owner_v_lifetime = 0.0, renter_v_lifetime = 0.0;
};

/// Bracket households by `key` at the given percentiles (e.g. 0,10,...,100)
/// and report mean-based changes per bracket. Empty brackets carry no values.
std::vector<BracketRow> bracket_report(std::span<const BracketObservation> observations,
                                       std::span<const double> percentiles);

} // namespace homesim
