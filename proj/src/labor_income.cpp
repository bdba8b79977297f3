#include "homesim/labor_income.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace homesim {

namespace {

constexpr double kSsiIndividual = 11316.0;
constexpr double kSsiSpouse = 5664.0;
constexpr std::uint64_t kCalibrationSeed = 0x5ca1ab1eULL;

double standard_normal(Xoshiro256& rng)
{
    std::normal_distribution<double> n01;
    return n01(rng);
}

} // namespace

MixtureDraw draw_mixture(const NormalMixture& mixture, Xoshiro256& rng)
{
    const bool first = rng.uniform() < mixture.p1;
    const double e = standard_normal(rng);
    if (first)
        return {mixture.mean1 + mixture.sd1 * e, 1};
    return {mixture.mean2 + mixture.sd2 * e, 2};
}

double IncomeProcess::unemployment_probability(double t, double z) const noexcept
{
    const double xi = xi_a + xi_b * t + xi_c * z + xi_d * t * z;
    return 1.0 / (1.0 + std::exp(-xi));
}

double IncomeProcess::unemployment_duration() const noexcept
{
    return std::min(1.0, std::exp(lambda_gamma));
}

IncomeParams draw_individual_params(const IncomeProcess& process, Xoshiro256& rng)
{
    const double e1 = standard_normal(rng);
    const double e2 = standard_normal(rng);
    const double e3 = standard_normal(rng);
    const double rho = process.rho_alpha_beta;
    IncomeParams p;
    p.alpha = process.sigma_alpha * e1;
    p.beta = process.sigma_beta * (rho * e1 + std::sqrt(1.0 - rho * rho) * e2);
    p.z0 = process.sigma_z0 * e3;
    return p;
}

IncomePath simulate_income_path(const IncomeParams& params, const IncomeProcess& process, Xoshiro256& rng,
                                int working_years)
{
    IncomePath path;
    path.years.reserve(static_cast<std::size_t>(working_years));
    double z = params.z0;
    for (int k = 0; k < working_years; ++k) {
        const double t = normalized_age(kStartAge + k);
        z = process.persistence * z + draw_mixture(process.persistent_shock, rng).value;
        const double eps = draw_mixture(process.transitory_shock, rng).value;
        const double u = rng.uniform();
        double gamma = 0.0;
        if (process.unemployment && u < process.unemployment_probability(t, z))
            gamma = process.unemployment_duration();

        IncomeYear year;
        year.z = z;
        year.transitory = eps;
        year.unemployment = gamma;
        year.income = process.level_factor * (1.0 - gamma) *
                      std::exp(process.profile(t) + params.alpha + params.beta * t + z + eps);
        path.years.push_back(year);
    }
    return path;
}

double calibrate_level_factor(IncomeProcess process, double target_usd, int age, int cohort_size)
{
    if (target_usd <= 0.0)
        throw std::invalid_argument("income target must be positive");
    process.level_factor = 1.0;
    const int years = age - kStartAge + 1;
    Xoshiro256 rng(kCalibrationSeed);
    double sum_log = 0.0;
    long employed = 0;
    for (int i = 0; i < cohort_size; ++i) {
        const auto params = draw_individual_params(process, rng);
        const auto path = simulate_income_path(params, process, rng, years);
        const double y = path.years.back().income;
        if (y > 0.0) {
            sum_log += std::log(y);
            ++employed;
        }
    }
    if (employed == 0)
        throw std::runtime_error("income calibration cohort has no employed individuals");
    return target_usd / std::exp(sum_log / static_cast<double>(employed));
}

double persistent_state_variance(const IncomeProcess& process, int years)
{
    const double l2 = process.persistence * process.persistence;
    double var = process.sigma_z0 * process.sigma_z0;
    for (int k = 0; k < years; ++k)
        var = l2 * var + process.persistent_shock.variance();
    return var;
}

double social_security(double last_income, double replacement)
{
    if (!(replacement > 0.0 && replacement <= 1.0))
        throw std::invalid_argument("replacement rate must be in (0, 1]");
    return replacement * last_income;
}

double minimum_consumption(int household_size)
{
    if (household_size < 1 || household_size > 2)
        throw std::invalid_argument("household size must be 1 or 2");
    return kSsiIndividual + kSsiSpouse * (household_size - 1);
}

double ssi_topup(double available_resources, int household_size)
{
    return std::max(0.0, minimum_consumption(household_size) - available_resources);
}

} // namespace homesim
