#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "homesim/block_bootstrap.hpp"
#include "homesim/household_sim.hpp"
#include "homesim/labor_income.hpp"
#include "homesim/macro_panel.hpp"
#include "homesim/metrics.hpp"
#include "homesim/mortality.hpp"

namespace homesim {

/// Invalid run configuration (CLI exit code 1).
class ConfigError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// Failure while simulating (CLI exit code 3).
class RuntimeError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

struct RunConfig
{
    std::filesystem::path data_dir = "data";
    std::string countries; // empty: all retained countries
    std::int64_t households = 1'000'000;
    std::uint64_t seed = 20240601;
    int threads = 0; // 0: hardware concurrency
    std::filesystem::path out_dir = "results";

    std::vector<double> down_fracs{0.1, 0.2, 0.3, 0.4, 0.5, 1.0};
    std::vector<double> threshold_fracs{0.1, 0.2, 0.3, 0.4, 0.5};
    bool second_home = true;
    std::vector<double> second_down_fracs{0.1, 0.2, 0.3, 0.4, 0.5, 1.0};
    std::vector<double> second_threshold_fracs{0.1, 0.2, 0.3};
    double base_down = 0.1;
    double base_threshold = 0.1;

    double replacement = 0.45;
    double income_target = 70'000.0;
    int hpi_anchor_year = 1990;
    double hpi_anchor_value = 4.14;
    std::int64_t comparison_paths = 1'000'000;

    /// Households whose base-cell trajectories are written to trajectories.csv.
    std::int64_t dump_trajectories = 0;

    void validate() const;
    /// Canonical text of every field that affects results (not threads or paths).
    std::string canonical() const;
    std::string hash() const;
};

/// Immutable inputs shared by all workers.
struct ModelInputs
{
    MacroPanel panel;
    LifeTable life_table;
    PlfTable plf;
    IncomeProcess income;
    std::string panel_fingerprint;
};

/// Load panel, life table and PLF table from config.data_dir, rescale the
/// HPI and calibrate the income level. Data problems raise DataError.
ModelInputs load_inputs(const RunConfig& config);

/// Everything random about one household; a pure function of (seed, index).
struct HouseholdDraw
{
    EconomicPath path;
    IncomePath male;
    IncomePath female;
    LifespanPair lifespans;
};

HouseholdDraw draw_household(const ModelInputs& inputs, std::uint64_t seed, std::uint64_t index);

SimulationParams simulation_params(const ModelInputs& inputs, const RunConfig& config);

/// Aggregates for one strategy cell; owner means are over households that
/// bought (and, for second-home cells, bought the second home).
struct CellResult
{
    Strategy strategy;
    std::int64_t households = 0;
    std::int64_t purchased = 0;
    std::int64_t retired = 0;          // purchased and lived to 65
    std::int64_t consumption_obs = 0;  // purchased, with at least one retirement year
    std::int64_t post_mdd_obs = 0;

    // Sums over the conditioned set; index 0 owner (or second-home owner),
    // 1 comparison arm (renter, or single-home base owner).
    std::array<double, 2> wealth_retirement{};
    std::array<double, 2> financial_retirement{};
    std::array<double, 2> wealth_death{};
    std::array<double, 2> financial_death{};
    std::array<double, 2> v_post{};
    std::array<double, 2> v_pre{};
    std::array<double, 2> v_lifetime{};
    std::array<double, 2> v_consumption{};
    std::array<double, 2> v_bequest{};
    std::array<double, 2> mdd_lifetime{};
    std::array<double, 2> mdd_pre{};
    std::array<double, 2> mdd_post{};
    std::array<double, 2> gini_retirement{};

    std::int64_t liquidations = 0, defaults = 0, rm_originations = 0;
    std::int64_t match_violations = 0, working_years = 0;

    double mean(const std::array<double, 2>& sums, int arm, std::int64_t n) const;
    /// owner mean / comparison mean - 1 for the given sums, nullopt when n is 0.
    std::optional<double> change(const std::array<double, 2>& sums, std::int64_t n) const;
};

struct AgeProfileRow
{
    int age = 0;
    std::int64_t households = 0;
    std::array<double, 2> wealth{}, financial{}, consumption{}, housing{};
};

struct ResultSet
{
    std::vector<CellResult> cells;        // down-major order over the grid
    std::vector<CellResult> second_home;  // first home at the base cell
    std::vector<std::pair<std::string, std::vector<BracketRow>>> heterogeneity;
    std::vector<AgeProfileRow> age_profile; // base cell, means over living households
    std::size_t base_cell = 0;

    std::uint64_t seed = 0;
    std::int64_t households = 0;
    std::string config_hash;
    std::string panel_fingerprint;
    std::string timestamp;
};

/// Simulate every household under every grid cell. Results do not depend on
/// the thread count.
ResultSet run_grid(const RunConfig& config, const ModelInputs& inputs);

/// Per-year mean and std of log real wealth of three annually rebalanced
/// portfolios started from wealth 1.
struct ComparisonRow
{
    int year = 0;
    std::array<double, 3> mean{};
    std::array<double, 3> stddev{};
};

inline const std::array<const char*, 3> kComparisonPortfolios{"all_equity", "stock_bond", "stock_house"};

struct ComparisonResult
{
    std::vector<ComparisonRow> rows; // years 1..horizon
    std::uint64_t seed = 0;
    std::int64_t paths = 0;
    std::string config_hash;
    std::string panel_fingerprint;
    std::string timestamp;
};

/// Real wealth multiplier for one year with the given stock weight; the
/// remaining weight goes to `other_return` (nominal).
double rebalanced_growth(const MarketState& m, double stock_weight, double other_return);

ComparisonResult run_strategy_comparison(const RunConfig& config, const ModelInputs& inputs);

/// Write one CSV per result table into `out_dir`; returns the files written.
std::vector<std::filesystem::path> write_tables(const ResultSet& results, const std::filesystem::path& out_dir);
std::filesystem::path write_comparison(const ComparisonResult& result, const std::filesystem::path& out_dir);

/// Base-cell year records of households [0, config.dump_trajectories), both arms.
std::filesystem::path write_trajectories(const RunConfig& config, const ModelInputs& inputs,
                                         const std::filesystem::path& out_dir);

} // namespace homesim
