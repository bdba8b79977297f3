#include "homesim/housing_finance.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include <fmt/format.h>

#include "homesim/macro_panel.hpp"

namespace homesim {

double ReverseMortgage::repayment(double available_equity) const noexcept
{
    return std::min(balance, std::max(0.0, available_equity));
}

double annuity_payment(double principal, double rate, int term)
{
    if (term <= 0)
        throw std::invalid_argument("loan term must be positive");
    if (rate == 0.0)
        return principal / term;
    return principal * rate / (1.0 - std::pow(1.0 + rate, -term));
}

Mortgage originate_mortgage(double home_value, double down_frac, double bond_rate, double spread)
{
    if (!(down_frac > 0.0 && down_frac <= 1.0))
        throw std::invalid_argument("down payment fraction must be in (0, 1]");
    Mortgage m;
    // Bond yields can fall below -spread; loan rates are floored at zero.
    m.rate = std::max(0.0, bond_rate + spread);
    if (down_frac >= 1.0)
        return m;
    m.principal = (1.0 - down_frac) * home_value;
    m.balance = m.principal;
    m.remaining_term = kMortgageTerm;
    m.annual_payment = annuity_payment(m.principal, m.rate, kMortgageTerm);
    return m;
}

double payment_due(const Mortgage& m) noexcept
{
    if (!m.active())
        return 0.0;
    return std::min(m.annual_payment, m.balance * (1.0 + m.rate));
}

Mortgage amortize_year(Mortgage m)
{
    if (!m.active())
        return m;
    const double owed = m.balance * (1.0 + m.rate);
    const double paid = payment_due(m);
    m.balance = owed - paid;
    m.remaining_term = std::max(0, m.remaining_term - 1);
    // Rounding residue after the last scheduled payment.
    if (m.remaining_term == 0 || m.balance < 1e-6)
        m.balance = 0.0;
    return m;
}

PlfTable::PlfTable(std::vector<int> ages, std::vector<double> rates, std::vector<std::vector<double>> values)
    : ages_(std::move(ages)), rates_(std::move(rates)), values_(std::move(values))
{
    if (ages_.empty() || rates_.empty())
        throw DataError("PLF table needs at least one age and one rate");
    if (!std::is_sorted(ages_.begin(), ages_.end()) || !std::is_sorted(rates_.begin(), rates_.end()))
        throw DataError("PLF grid axes must be sorted");
    if (values_.size() != ages_.size())
        throw DataError("PLF grid has wrong number of age rows");
    for (const auto& row : values_)
        if (row.size() != rates_.size())
            throw DataError("PLF grid has wrong number of rate columns");
}

namespace {

/// Bracketing index and weight on a sorted axis, clamped at the ends.
template <typename T>
std::pair<std::size_t, double> locate(const std::vector<T>& axis, double x)
{
    if (axis.size() == 1 || x <= static_cast<double>(axis.front()))
        return {0, 0.0};
    if (x >= static_cast<double>(axis.back()))
        return {axis.size() - 2, 1.0};
    auto hi = std::upper_bound(axis.begin(), axis.end(), x,
                               [](double v, const T& a) { return v < static_cast<double>(a); });
    const auto i = static_cast<std::size_t>(hi - axis.begin()) - 1;
    const double lo_x = static_cast<double>(axis[i]);
    const double hi_x = static_cast<double>(axis[i + 1]);
    return {i, (x - lo_x) / (hi_x - lo_x)};
}

} // namespace

double PlfTable::lookup(double age, double rate) const
{
    auto [ia, wa] = locate(ages_, age);
    auto [ir, wr] = locate(rates_, rate);
    const std::size_t ia1 = std::min(ia + 1, ages_.size() - 1);
    const std::size_t ir1 = std::min(ir + 1, rates_.size() - 1);
    const double low_age = (1.0 - wr) * values_[ia][ir] + wr * values_[ia][ir1];
    const double high_age = (1.0 - wr) * values_[ia1][ir] + wr * values_[ia1][ir1];
    return (1.0 - wa) * low_age + wa * high_age;
}

double plf_lookup(double age, double rate, const PlfTable& table)
{
    return table.lookup(age, rate);
}

PlfTable load_plf_table(const std::filesystem::path& file)
{
    std::ifstream in(file);
    if (!in)
        throw DataError("cannot open PLF table " + file.string());
    std::string line;
    std::getline(in, line);
    if (line.rfind("age,rate,plf", 0) != 0)
        throw DataError("PLF table " + file.string() + " must have header age,rate,plf");

    std::map<int, std::map<double, double>> grid;
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r")
            continue;
        std::istringstream row(line);
        std::string a, r, p;
        std::getline(row, a, ',');
        std::getline(row, r, ',');
        std::getline(row, p, ',');
        try {
            grid[std::stoi(a)][std::stod(r)] = std::stod(p);
        } catch (const std::exception&) {
            throw DataError("bad PLF row: " + line);
        }
    }
    std::vector<int> ages;
    std::vector<double> rates;
    for (const auto& [rate, _] : grid.begin()->second)
        rates.push_back(rate);
    std::vector<std::vector<double>> values;
    for (const auto& [age, row] : grid) {
        if (row.size() != rates.size())
            throw DataError(fmt::format("PLF grid row for age {} is incomplete", age));
        ages.push_back(age);
        std::vector<double> v;
        for (double rate : rates) {
            auto it = row.find(rate);
            if (it == row.end())
                throw DataError(fmt::format("PLF grid has no value for age {} rate {}", age, rate));
            v.push_back(it->second);
        }
        values.push_back(std::move(v));
    }
    return PlfTable(std::move(ages), std::move(rates), std::move(values));
}

ReverseMortgageOrigination originate_reverse_mortgage(const Home& home, int age, double bond_rate,
                                                      const PlfTable& table,
                                                      const std::optional<ReverseMortgage>& existing,
                                                      const ReverseMortgageCosts& costs)
{
    if (existing)
        throw HousingError("household already has a reverse mortgage");
    if (!home.is_primary)
        throw HousingError("reverse mortgage requires the primary residence as collateral");

    ReverseMortgageOrigination out;
    out.loan.rate = std::max(0.0, bond_rate + kReverseMortgageSpread);
    out.loan.origination_age = age;
    const double plf = plf_lookup(age, out.loan.rate, table);
    out.loan.limit = plf * home.value;
    out.loan.balance = out.loan.limit;
    if (out.loan.limit > 0.0)
        out.lump_sum = std::max(0.0, out.loan.limit - costs.fraction_of_value * home.value - costs.flat);
    return out;
}

double sale_pnl(const Home& home, double mortgage_balance, double rm_balance)
{
    const double net_sale = (1.0 - kTransactionCost) * home.value;
    const double after_mortgage = net_sale - mortgage_balance;
    return after_mortgage - std::min(rm_balance, std::max(0.0, after_mortgage));
}

} // namespace homesim
