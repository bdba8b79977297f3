#include "homesim/mortality.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "homesim/macro_panel.hpp"

namespace homesim {

LifeTable LifeTable::constant(double q)
{
    LifeTable t;
    for (auto& row : t.q_)
        row.fill(q);
    for (auto& row : t.q_)
        for (int a = kMaxAge; a < kAges; ++a)
            row[static_cast<std::size_t>(a)] = 1.0;
    return t;
}

double LifeTable::q(Sex sex, int age) const
{
    if (age < 0)
        return 0.0;
    if (age >= kAges)
        return 1.0;
    return q_[static_cast<std::size_t>(sex)][static_cast<std::size_t>(age)];
}

void LifeTable::set(Sex sex, int age, double q)
{
    q_.at(static_cast<std::size_t>(sex)).at(static_cast<std::size_t>(age)) = q;
}

double LifeTable::survival(Sex sex, int age, int from_age) const
{
    double s = 1.0;
    for (int a = from_age; a < std::min(age, kMaxAge); ++a)
        s *= 1.0 - q(sex, a);
    return age > kMaxAge ? 0.0 : s;
}

double LifeTable::expected_death_age(Sex sex, int from_age) const
{
    double alive = 1.0;
    double expectation = 0.0;
    for (int a = from_age; a <= kLastLivedAge; ++a) {
        expectation += alive * q(sex, a) * a;
        alive *= 1.0 - q(sex, a);
    }
    return expectation + alive * kMaxAge;
}

LifeTable load_life_table(const std::filesystem::path& file)
{
    std::ifstream in(file);
    if (!in)
        throw DataError("cannot open life table " + file.string());
    std::string line;
    std::getline(in, line);
    std::vector<std::string> header;
    {
        std::istringstream h(line);
        std::string col;
        while (std::getline(h, col, ','))
            header.push_back(col.substr(0, col.find_last_not_of(" \r") + 1));
    }
    auto column = [&](const char* name) {
        auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end())
            throw DataError(fmt::format("life table {} is missing column '{}'", file.string(), name));
        return static_cast<std::size_t>(it - header.begin());
    };
    const auto c_sex = column("sex");
    const auto c_age = column("age");
    const auto c_q = column("death_probability");

    LifeTable table;
    std::array<std::array<bool, LifeTable::kAges>, 2> seen{};
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r")
            continue;
        std::vector<std::string> f;
        std::istringstream row(line);
        std::string cell;
        while (std::getline(row, cell, ','))
            f.push_back(cell.substr(0, cell.find_last_not_of(" \r") + 1));
        if (f.size() < header.size())
            throw DataError("short row in life table: " + line);
        Sex sex;
        if (f[c_sex] == "male" || f[c_sex] == "M" || f[c_sex] == "m")
            sex = Sex::male;
        else if (f[c_sex] == "female" || f[c_sex] == "F" || f[c_sex] == "f")
            sex = Sex::female;
        else
            throw DataError("unknown sex '" + f[c_sex] + "' in life table");
        const int age = std::stoi(f[c_age]);
        double q = 0.0;
        auto [ptr, ec] = std::from_chars(f[c_q].data(), f[c_q].data() + f[c_q].size(), q);
        if (ec != std::errc{} || q < 0.0 || q > 1.0)
            throw DataError("bad death probability '" + f[c_q] + "' in life table");
        if (age < 0 || age >= LifeTable::kAges)
            continue;
        table.set(sex, age, q);
        seen[static_cast<std::size_t>(sex)][static_cast<std::size_t>(age)] = true;
    }
    for (Sex sex : {Sex::male, Sex::female}) {
        for (int age = 25; age <= kMaxAge; ++age)
            if (!seen[static_cast<std::size_t>(sex)][static_cast<std::size_t>(age)])
                throw DataError(fmt::format("life table {} has no {} row for age {}", file.string(),
                                            sex == Sex::male ? "male" : "female", age));
        for (int age = kMaxAge; age < LifeTable::kAges; ++age)
            table.set(sex, age, 1.0);
    }
    return table;
}

int simulate_lifespan(Sex sex, const LifeTable& table, Xoshiro256& rng, int start_age)
{
    for (int age = start_age; age <= kLastLivedAge; ++age)
        if (rng.uniform() < table.q(sex, age))
            return age;
    return kMaxAge;
}

int LifespanPair::household_years() const noexcept
{
    return std::min(household_end_age(), kLastLivedAge) - 25 + 1;
}

int alive_count(int age, const LifespanPair& pair) noexcept
{
    if (age > kLastLivedAge)
        return 0;
    return (age <= pair.death_age_male ? 1 : 0) + (age <= pair.death_age_female ? 1 : 0);
}

} // namespace homesim
