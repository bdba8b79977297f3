#include "homesim/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

namespace homesim {

double consumption_utility(double consumption, int alive, const UtilityParams& params)
{
    if (!(consumption > 0.0))
        throw std::domain_error(fmt::format("consumption must be positive, got {}", consumption));
    if (alive < 1)
        throw std::domain_error("utility needs at least one living household member");
    const double one_minus = 1.0 - params.risk_aversion;
    const double scaled = consumption / std::sqrt(static_cast<double>(alive));
    return std::pow(scaled, one_minus) / one_minus;
}

double bequest_utility(double terminal_wealth, const UtilityParams& params)
{
    const double one_minus = 1.0 - params.risk_aversion;
    return params.bequest_intensity * std::pow(terminal_wealth + params.bequest_curvature, one_minus) / one_minus;
}

UtilityComponents utility_of_path(std::span<const double> consumption, std::span<const int> alive,
                                  double terminal_wealth, Window window, int first_retirement_year,
                                  const UtilityParams& params)
{
    if (consumption.size() != alive.size())
        throw std::invalid_argument("consumption and alive-count series differ in length");
    const auto n = static_cast<int>(consumption.size());
    int begin = 0;
    int end = n;
    if (window == Window::pre_retirement)
        end = std::min(n, first_retirement_year);
    else if (window == Window::post_retirement)
        begin = std::min(n, first_retirement_year);

    UtilityComponents u;
    for (int t = begin; t < end; ++t)
        u.consumption_utility += consumption_utility(consumption[static_cast<std::size_t>(t)],
                                                     alive[static_cast<std::size_t>(t)], params);
    // Death falls in the window when the window reaches the last simulated year.
    const bool includes_death = window != Window::pre_retirement || n <= first_retirement_year;
    if (includes_death)
        u.bequest_utility = bequest_utility(terminal_wealth, params);
    u.total = u.consumption_utility + u.bequest_utility;
    if (u.total < 0.0)
        u.equivalent_wealth = equivalent_wealth(u.total, params);
    return u;
}

double equivalent_wealth(double utility, const UtilityParams& params)
{
    const double one_minus = 1.0 - params.risk_aversion;
    if (one_minus < 0.0 && !(utility < 0.0))
        throw std::domain_error(fmt::format("equivalent wealth needs negative utility, got {}", utility));
    // Evaluated in logs so very small |U| does not overflow the power.
    return std::exp(std::log(one_minus * utility) / one_minus);
}

double wealth_change(double owner_mean, double renter_mean)
{
    if (!(renter_mean > 0.0))
        throw std::domain_error(fmt::format("benchmark mean must be positive, got {}", renter_mean));
    return owner_mean / renter_mean - 1.0;
}

double max_drawdown(std::span<const double> wealth_path)
{
    double peak = 0.0;
    double worst = 0.0;
    for (double w : wealth_path) {
        peak = std::max(peak, w);
        if (peak > 0.0)
            worst = std::max(worst, 1.0 - w / peak);
    }
    return worst;
}

double gini(std::vector<double> wealths)
{
    if (wealths.empty())
        throw std::domain_error("gini of an empty sample");
    std::sort(wealths.begin(), wealths.end());
    if (wealths.front() < 0.0)
        throw std::domain_error("gini requires non-negative wealth");
    const auto n = static_cast<double>(wealths.size());
    double total = 0.0;
    double ranked = 0.0;
    for (std::size_t i = 0; i < wealths.size(); ++i) {
        total += wealths[i];
        ranked += (2.0 * static_cast<double>(i + 1) - n - 1.0) * wealths[i];
    }
    if (!(total > 0.0))
        throw std::domain_error("gini requires positive total wealth");
    return ranked / (n * total);
}

double gini_pairwise(std::span<const double> wealths)
{
    if (wealths.empty())
        throw std::domain_error("gini of an empty sample");
    double diff = 0.0;
    double total = 0.0;
    for (double a : wealths) {
        total += a;
        for (double b : wealths)
            diff += std::abs(a - b);
    }
    if (!(total > 0.0))
        throw std::domain_error("gini requires positive total wealth");
    return diff / (2.0 * static_cast<double>(wealths.size()) * total);
}

std::vector<double> percentile_edges(std::vector<double> keys, std::span<const double> percentiles)
{
    if (keys.empty())
        throw std::domain_error("percentiles of an empty sample");
    std::sort(keys.begin(), keys.end());
    std::vector<double> edges;
    const auto n = static_cast<double>(keys.size());
    for (double p : percentiles) {
        const double rank = std::ceil(p / 100.0 * n);
        const auto idx = static_cast<std::size_t>(std::clamp(rank - 1.0, 0.0, n - 1.0));
        edges.push_back(keys[idx]);
    }
    return edges;
}

std::vector<BracketRow> bracket_report(std::span<const BracketObservation> observations,
                                       std::span<const double> percentiles)
{
    if (percentiles.size() < 2)
        throw std::invalid_argument("need at least two percentile edges");
    std::vector<BracketRow> rows(percentiles.size() - 1);
    for (std::size_t k = 0; k + 1 < percentiles.size(); ++k)
        rows[k].label = fmt::format("{:g}-{:g}", percentiles[k], percentiles[k + 1]);
    if (observations.empty())
        return rows;

    std::vector<double> keys;
    keys.reserve(observations.size());
    for (const auto& o : observations)
        keys.push_back(o.key);
    const auto edges = percentile_edges(keys, percentiles);

    struct Sums
    {
        double ret_o = 0, ret_r = 0, death_o = 0, death_r = 0, post_o = 0, post_r = 0, life_o = 0, life_r = 0;
        std::size_t n = 0, n_ret = 0;
    };
    std::vector<Sums> sums(rows.size());
    for (const auto& o : observations) {
        // Interior edges at or below the key decide the bracket.
        const auto bracket = static_cast<std::size_t>(
            std::upper_bound(edges.begin() + 1, edges.end() - 1, o.key) - (edges.begin() + 1));
        auto& s = sums[bracket];
        ++s.n;
        s.death_o += o.owner_wealth_death;
        s.death_r += o.renter_wealth_death;
        s.post_o += o.owner_v_post;
        s.post_r += o.renter_v_post;
        s.life_o += o.owner_v_lifetime;
        s.life_r += o.renter_v_lifetime;
        if (o.reached_retirement) {
            ++s.n_ret;
            s.ret_o += o.owner_wealth_retirement;
            s.ret_r += o.renter_wealth_retirement;
        }
    }
    auto change = [](double o, double r) -> std::optional<double> {
        if (!(r > 0.0))
            return std::nullopt;
        return o / r - 1.0;
    };
    for (std::size_t k = 0; k < rows.size(); ++k) {
        const auto& s = sums[k];
        rows[k].count = s.n;
        if (s.n == 0)
            continue;
        rows[k].wealth_change_death = change(s.death_o, s.death_r);
        rows[k].welfare_change_post = change(s.post_o, s.post_r);
        rows[k].welfare_change_lifetime = change(s.life_o, s.life_r);
        if (s.n_ret > 0)
            rows[k].wealth_change_retirement = change(s.ret_o, s.ret_r);
    }
    return rows;
}

} // namespace homesim
