#pragma once

#include <vector>

#include "homesim/rng.hpp"

namespace homesim {

inline constexpr int kWorkingYears = 40; // ages 25..64
inline constexpr int kStartAge = 25;
inline constexpr int kRetirementAge = 65;

/// Two-component normal mixture: component 1 with probability p1.
struct NormalMixture
{
    double p1 = 1.0;
    double mean1 = 0.0, sd1 = 0.0;
    double mean2 = 0.0, sd2 = 0.0;

    double mean() const noexcept { return p1 * mean1 + (1.0 - p1) * mean2; }
    double variance() const noexcept
    {
        const double m = mean();
        return p1 * (sd1 * sd1 + mean1 * mean1) + (1.0 - p1) * (sd2 * sd2 + mean2 * mean2) - m * m;
    }
};

struct MixtureDraw
{
    double value = 0.0;
    int component = 1; // 1 or 2
};

MixtureDraw draw_mixture(const NormalMixture& mixture, Xoshiro256& rng);

/// Earnings process parameters. Defaults are the published estimates, with
/// the table's "a_3" read as the quadratic coefficient a2 and "lambda_nu"
/// as the AR(1) coefficient of the persistent state.
struct IncomeProcess
{
    double a0 = 2.581, a1 = 0.812, a2 = -0.185;
    double sigma_alpha = 0.3, sigma_beta = 0.196, rho_alpha_beta = 0.768;
    double persistence = 0.959;
    double sigma_z0 = 0.714;
    NormalMixture persistent_shock{0.407, -0.085, 0.364, 0.058, 0.069};
    NormalMixture transitory_shock{0.13, 0.271, 0.285, -0.040, 0.037};
    bool unemployment = true;
    double lambda_gamma = 0.0001;
    double xi_a = -3.036, xi_b = -0.917, xi_c = -5.397, xi_d = -4.442;
    /// Multiplier taking model units to 2024 USD; see calibrate_level_factor.
    double level_factor = 1.0;

    /// Deterministic life-cycle profile g(t), t = (age - 24) / 10.
    double profile(double t) const noexcept { return a0 + a1 * t + a2 * t * t; }
    /// Probability of a nonemployment spell given normalized age and z.
    double unemployment_probability(double t, double z) const noexcept;
    /// Spell length as a fraction of the year when unemployed.
    double unemployment_duration() const noexcept;
};

inline double normalized_age(int age) noexcept { return (age - 24) / 10.0; }

struct IncomeParams
{
    double alpha = 0.0;
    double beta = 0.0;
    double z0 = 0.0;
};

struct IncomeYear
{
    double income = 0.0; // 2024 USD
    double z = 0.0;
    double transitory = 0.0;
    double unemployment = 0.0; // gamma, fraction of the year without work
};

struct IncomePath
{
    std::vector<IncomeYear> years; // index 0 is age 25

    double last_income() const { return years.empty() ? 0.0 : years.back().income; }
};

IncomeParams draw_individual_params(const IncomeProcess& process, Xoshiro256& rng);

IncomePath simulate_income_path(const IncomeParams& params, const IncomeProcess& process, Xoshiro256& rng,
                                int working_years = kWorkingYears);

/// Level factor such that exp(mean log earnings) of employed individuals at
/// `age` equals `target_usd`, measured on a fixed-seed calibration cohort.
double calibrate_level_factor(IncomeProcess process, double target_usd, int age = 45,
                              int cohort_size = 200'000);

/// Unconditional Var(z) after `years` AR(1) steps from z0.
double persistent_state_variance(const IncomeProcess& process, int years);

/// Retirement annuity: lambda times the last working-year income.
double social_security(double last_income, double replacement);

/// Minimum consumption guaranteed by SSI for a household of 1 or 2.
double minimum_consumption(int household_size);

/// SSI payment that lifts `available_resources` to the minimum consumption.
double ssi_topup(double available_resources, int household_size);

} // namespace homesim
