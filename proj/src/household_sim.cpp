#include "homesim/household_sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>

namespace homesim {

double YearRecord::budget_residual() const noexcept
{
    const double in = labor + social_security + rent_income + ssi + rm_proceeds + sale_proceeds;
    const double out = consumption + housing_costs + purchase_outlay + asset_flow;
    return in - out;
}

double YearRecord::budget_scale() const noexcept
{
    return labor + social_security + rent_income + ssi + rm_proceeds + sale_proceeds + consumption +
           housing_costs + purchase_outlay + std::abs(asset_flow);
}

double ArmOutcome::mdd_lifetime() const
{
    return max_drawdown(std::span<const double>(wealth.data(), static_cast<std::size_t>(years)));
}

double ArmOutcome::mdd_pre() const
{
    const auto n = static_cast<std::size_t>(std::min(years, kRetirementYear));
    return max_drawdown(std::span<const double>(wealth.data(), n));
}

std::optional<double> ArmOutcome::mdd_post() const
{
    if (years <= kRetirementYear)
        return std::nullopt;
    return max_drawdown(std::span<const double>(wealth.data() + kRetirementYear,
                                                static_cast<std::size_t>(years - kRetirementYear)));
}

HouseholdEnvironment make_environment(const EconomicPath& path, const IncomePath& male, const IncomePath& female,
                                      const LifespanPair& lifespans, double replacement)
{
    HouseholdEnvironment env;
    env.path = &path;
    env.lifespans = lifespans;
    env.years = lifespans.household_years();
    if (static_cast<int>(path.size()) < env.years)
        throw std::invalid_argument("economic path shorter than the household's life");
    if (static_cast<int>(male.years.size()) < kWorkingYears || static_cast<int>(female.years.size()) < kWorkingYears)
        throw std::invalid_argument("income paths must cover the working life");

    const double ss_male = social_security(male.last_income(), replacement);
    const double ss_female = social_security(female.last_income(), replacement);
    for (int t = 0; t < env.years; ++t) {
        const int age = kStartAge + t;
        const bool male_alive = age <= lifespans.death_age_male;
        const bool female_alive = age <= lifespans.death_age_female;
        const auto k = static_cast<std::size_t>(t);
        env.alive[k] = alive_count(age, lifespans);
        if (t < kWorkingYears) {
            env.labor[k] = (male_alive ? male.years[k].income : 0.0) + (female_alive ? female.years[k].income : 0.0);
        } else {
            env.social_security[k] = (male_alive ? ss_male : 0.0) + (female_alive ? ss_female : 0.0);
        }
    }
    return env;
}

PurchaseDecision try_purchase(double financial_assets, double down_frac, double threshold_frac, double pti_cap,
                              double hpi, double household_income, double bond_rate)
{
    PurchaseDecision d;
    if (!(household_income > 0.0) || !(hpi > 0.0))
        return d;
    const double value = hpi * household_income;
    if (financial_assets < (down_frac + threshold_frac) * value)
        return d;
    Mortgage mortgage = originate_mortgage(value, down_frac, bond_rate);
    if (mortgage.annual_payment > pti_cap * household_income)
        return d;
    d.buy = true;
    d.home_value = value;
    d.mortgage = mortgage;
    d.outlay = (down_frac + kTransactionCost) * value;
    return d;
}

double retirement_withdrawal(double financial_assets, double floor_withdrawal)
{
    return std::max(kWithdrawalRate * financial_assets, floor_withdrawal);
}

bool should_take_reverse_mortgage(const RmProjection& p)
{
    double assets = p.financial_assets;
    for (int year = 0; year < kRmLookaheadYears; ++year) {
        const double consumption = std::max(retirement_withdrawal(assets, p.floor_withdrawal), p.minimum_consumption);
        assets += p.annual_income - p.annual_obligations - consumption;
        if (assets < 0.0)
            return true;
    }
    return false;
}

LiquidationReason should_liquidate(const Home& home, double liquid_resources, double minimum_consumption)
{
    if (home.ltv() > kLiquidationLtv)
        return LiquidationReason::ltv;
    if (liquid_resources < minimum_consumption)
        return LiquidationReason::liquidity;
    return LiquidationReason::none;
}

Settlement settle_renter(double assets, double net_income, double target, double minimum)
{
    const double available = assets + net_income;
    if (available >= target)
        return {target, available - target, 0.0};
    if (available >= minimum)
        return {available, 0.0, 0.0};
    return {minimum, 0.0, minimum - available};
}

double net_worth(double financial_assets, const std::vector<Home>& homes,
                 const std::optional<ReverseMortgage>& reverse_mortgage)
{
    double wealth = financial_assets;
    for (const auto& h : homes) {
        const double rm = (h.is_primary && reverse_mortgage) ? reverse_mortgage->balance : 0.0;
        wealth += std::max(0.0, sale_pnl(h, h.mortgage.balance, rm));
    }
    return wealth;
}

namespace {

struct Obligations
{
    double mortgage = 0.0;
    double maintenance = 0.0;
    double rent = 0.0;
    double rent_income = 0.0;

    double total() const noexcept { return mortgage + maintenance + rent; }
};

/// One arm's annual state machine. The owner arm runs with a strategy; the
/// benchmark arm runs with the owner's trace and never buys.
class ArmSimulator
{
public:
    ArmSimulator(const HouseholdEnvironment& env, const SimulationParams& params, const Strategy* strategy,
                 const ArmOutcome* owner)
        : env_(env), params_(params), strategy_(strategy), owner_(owner)
    {
    }

    ArmOutcome run()
    {
        out_.years = env_.years;
        if (params_.record_years)
            out_.records.reserve(static_cast<std::size_t>(env_.years));
        for (int t = 0; t < env_.years; ++t)
            step(t);

        const auto last = static_cast<std::size_t>(env_.years - 1);
        out_.terminal_wealth = out_.wealth[last];
        out_.terminal_financial = out_.financial[last];
        out_.utility_bequest = bequest_utility(out_.terminal_wealth, params_.utility);
        out_.reached_retirement = env_.years > kRetirementYear;
        return std::move(out_);
    }

private:
    bool is_benchmark() const noexcept { return owner_ != nullptr; }

    bool has_primary() const noexcept
    {
        return std::any_of(homes_.begin(), homes_.end(), [](const Home& h) { return h.is_primary; });
    }

    Home* primary()
    {
        auto it = std::find_if(homes_.begin(), homes_.end(), [](const Home& h) { return h.is_primary; });
        return it == homes_.end() ? nullptr : &*it;
    }

    double rent_base(int t) const
    {
        return is_benchmark() ? owner_->occupied_value[static_cast<std::size_t>(t)] : reference_home_;
    }

    Obligations obligations(const MarketState& m, int t) const
    {
        Obligations o;
        bool lives_in_own_home = false;
        for (const auto& h : homes_) {
            o.mortgage += payment_due(h.mortgage);
            o.maintenance += h.maintenance();
            if (h.is_primary)
                lives_in_own_home = true;
            else
                o.rent_income += m.rental_yield * h.value;
        }
        if (!lives_in_own_home)
            o.rent = m.rental_yield * rent_base(t);
        return o;
    }

    void liquidate(std::size_t idx, YearRecord& rec)
    {
        const Home home = homes_[idx];
        const double rm_balance = (home.is_primary && reverse_mortgage_) ? reverse_mortgage_->balance : 0.0;
        const double pnl = sale_pnl(home, home.mortgage.balance, rm_balance);
        if (pnl > 0.0) {
            assets_ += pnl;
            rec.sale_proceeds += pnl;
        } else {
            defaulted_ = true;
            rec.defaulted = true;
            ++out_.defaults;
        }
        rec.liquidated = true;
        ++out_.liquidations;
        if (home.is_primary) {
            reverse_mortgage_.reset();
            reference_home_ = home.value;
        }
        homes_.erase(homes_.begin() + static_cast<std::ptrdiff_t>(idx));
    }

    void purchases(const MarketState& m, int t, YearRecord& rec)
    {
        const Strategy& s = *strategy_;
        const double bond = m.bond_return;
        if (!bought_first_ && homes_.empty() && !(defaulted_ && s.down_frac < 1.0)) {
            auto d = try_purchase(assets_, s.down_frac, s.threshold_frac, s.pti_cap, m.hpi, rec.labor, bond);
            if (d.buy) {
                assets_ -= d.outlay;
                rec.purchase_outlay += d.outlay;
                homes_.push_back(Home{d.home_value, true, d.mortgage});
                bought_first_ = true;
                rec.purchased = true;
                out_.purchase = PurchaseInfo{t, rec.labor, m.hpi, bond, d.mortgage.rate, d.home_value};
                return;
            }
        }
        if (s.allow_second_home && bought_first_ && !bought_second_ && homes_.size() == 1 && homes_[0].is_primary &&
            !(defaulted_ && s.second_down_frac < 1.0)) {
            // A financed second home requires the first mortgage to be paid off first.
            const double payoff = s.second_down_frac < 1.0 ? homes_[0].mortgage.balance : 0.0;
            auto d = try_purchase(assets_ - payoff, s.second_down_frac, s.second_threshold_frac, s.pti_cap, m.hpi,
                                  rec.labor, bond);
            if (d.buy) {
                assets_ -= payoff + d.outlay;
                rec.purchase_outlay += payoff + d.outlay;
                if (payoff > 0.0)
                    homes_[0].mortgage = Mortgage{};
                homes_.push_back(Home{d.home_value, false, d.mortgage});
                bought_second_ = true;
                rec.purchased_second = true;
                out_.second_purchase = PurchaseInfo{t, rec.labor, m.hpi, bond, d.mortgage.rate, d.home_value};
            }
        }
    }

    void maybe_take_reverse_mortgage(const MarketState& m, int t, double income, double floor, YearRecord& rec)
    {
        Home* home = primary();
        if (!home || reverse_mortgage_ || params_.plf == nullptr)
            return;
        const auto o = obligations(m, t);
        const RmProjection projection{assets_, floor_withdrawal_, income + o.rent_income,
                                      o.mortgage + o.maintenance, floor};
        if (!should_take_reverse_mortgage(projection))
            return;
        const auto origination = originate_reverse_mortgage(*home, kStartAge + t, m.bond_return, *params_.plf,
                                                            reverse_mortgage_, params_.rm_costs);
        // Proceeds first retire any forward mortgage on the collateral.
        const double payoff = home->mortgage.balance;
        if (origination.lump_sum <= payoff)
            return;
        reverse_mortgage_ = origination.loan;
        home->mortgage = Mortgage{};
        assets_ += origination.lump_sum - payoff;
        rec.rm_proceeds += origination.lump_sum;
        rec.purchase_outlay += payoff;
        rec.rm_originated = true;
        ++out_.rm_originations;
    }

    void apply_liquidation_rules(const MarketState& m, int t, double income, double floor, YearRecord& rec)
    {
        for (std::size_t k = homes_.size(); k-- > 0;)
            if (should_liquidate(homes_[k], std::numeric_limits<double>::infinity(), floor) == LiquidationReason::ltv)
                liquidate(k, rec);
        while (!homes_.empty()) {
            const auto o = obligations(m, t);
            const double liquid = assets_ + income + o.rent_income - o.total();
            // Rented-out homes go first.
            std::size_t pick = 0;
            for (std::size_t k = 0; k < homes_.size(); ++k)
                if (!homes_[k].is_primary)
                    pick = k;
            if (should_liquidate(homes_[pick], liquid, floor) == LiquidationReason::none)
                break;
            liquidate(pick, rec);
        }
    }

    void step(int t)
    {
        const auto k = static_cast<std::size_t>(t);
        const MarketState& m = (*env_.path)[k];
        const int age = kStartAge + t;
        const int alive = env_.alive[k];
        const double floor = minimum_consumption(alive);
        const bool working = t < kRetirementYear;

        YearRecord rec;
        rec.age = age;
        rec.alive = alive;

        const double deflator = 1.0 + m.inflation;
        assets_ /= deflator;
        // Loans are nominal: balances and level payments lose real value with inflation.
        for (auto& h : homes_) {
            h.value /= deflator;
            h.mortgage.balance /= deflator;
            h.mortgage.annual_payment /= deflator;
        }
        if (reverse_mortgage_)
            reverse_mortgage_->balance /= deflator;
        reference_home_ /= deflator;
        const double assets_start = assets_;

        if (!working && !retired_) {
            retired_ = true;
            floor_withdrawal_ = kWithdrawalRate * assets_;
        }

        rec.labor = env_.labor[k];
        rec.social_security = env_.social_security[k];
        const double income = rec.labor + rec.social_security;
        if (!(reference_home_ > 0.0) && rec.labor > 0.0)
            reference_home_ = m.hpi * rec.labor;

        if (!is_benchmark()) {
            if (working && strategy_ != nullptr)
                purchases(m, t, rec);
            if (!working)
                maybe_take_reverse_mortgage(m, t, income, floor, rec);
            apply_liquidation_rules(m, t, income, floor, rec);
        }

        const auto o = obligations(m, t);
        rec.mortgage_paid = o.mortgage;
        rec.maintenance = o.maintenance;
        rec.rent_paid = o.rent;
        rec.rent_income = o.rent_income;
        rec.housing_costs = o.total();
        const double net = income + o.rent_income - rec.housing_costs;

        double target = 0.0;
        if (is_benchmark() && working)
            target = owner_->consumption[k];
        else if (working)
            target = std::max((1.0 - kSavingRate) * net, floor);
        else
            target = std::max(retirement_withdrawal(assets_, floor_withdrawal_), floor);

        if (homes_.empty()) {
            const auto settled = settle_renter(assets_, net, target, floor);
            rec.consumption = settled.consumption;
            rec.ssi = settled.ssi;
            assets_ = settled.assets;
        } else {
            const double available = assets_ + net;
            rec.consumption = std::min(target, available);
            assets_ = available - rec.consumption;
        }
        if (is_benchmark() && working && rec.consumption < target) {
            rec.match_violation = true;
            ++out_.match_violations;
        }
        rec.asset_flow = assets_ - assets_start;

        const Home* own = primary();
        rec.occupied_value = own ? own->value : rent_base(t);

        // Loans accrue; returns apply.
        for (auto& h : homes_)
            h.mortgage = amortize_year(h.mortgage);
        if (reverse_mortgage_)
            reverse_mortgage_->balance *= 1.0 + reverse_mortgage_->rate;
        assets_ *= 1.0 + m.stock_return;
        for (auto& h : homes_)
            h.value *= 1.0 + m.housing_return;
        reference_home_ *= 1.0 + m.housing_return;

        rec.financial_assets = assets_;
        rec.housing_value = 0.0;
        for (const auto& h : homes_)
            rec.housing_value += h.value;
        rec.wealth = net_worth(assets_, homes_, reverse_mortgage_);

        out_.wealth[k] = rec.wealth;
        out_.financial[k] = rec.financial_assets;
        out_.consumption[k] = rec.consumption;
        out_.occupied_value[k] = rec.occupied_value;
        out_.alive[k] = alive;
        const double u = consumption_utility(rec.consumption, alive, params_.utility);
        (working ? out_.utility_pre : out_.utility_post) += u;
        if (t == kRetirementYear - 1) {
            out_.wealth_at_retirement = rec.wealth;
            out_.financial_at_retirement = rec.financial_assets;
        }
        if (params_.record_years)
            out_.records.push_back(rec);
    }

    const HouseholdEnvironment& env_;
    const SimulationParams& params_;
    const Strategy* strategy_;
    const ArmOutcome* owner_;

    ArmOutcome out_;
    double assets_ = 0.0;
    std::vector<Home> homes_;
    std::optional<ReverseMortgage> reverse_mortgage_;
    double reference_home_ = 0.0;
    double floor_withdrawal_ = 0.0;
    bool retired_ = false;
    bool defaulted_ = false;
    bool bought_first_ = false;
    bool bought_second_ = false;
};

} // namespace

ArmOutcome simulate_owner(const HouseholdEnvironment& env, const Strategy& strategy, const SimulationParams& params)
{
    return ArmSimulator(env, params, &strategy, nullptr).run();
}

ArmOutcome simulate_benchmark(const HouseholdEnvironment& env, const ArmOutcome& owner, const SimulationParams& params)
{
    if (owner.years != env.years)
        throw std::invalid_argument("owner trace does not match the household");
    return ArmSimulator(env, params, nullptr, &owner).run();
}

PairedOutcome simulate_pair(const HouseholdEnvironment& env, const Strategy& strategy, const SimulationParams& params)
{
    PairedOutcome out;
    out.owner = simulate_owner(env, strategy, params);
    out.renter = simulate_benchmark(env, out.owner, params);
    return out;
}

} // namespace homesim
