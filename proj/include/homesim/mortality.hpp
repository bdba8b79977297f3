#pragma once

#include <array>
#include <filesystem>

#include "homesim/rng.hpp"

namespace homesim {

inline constexpr int kMaxAge = 100;
/// Last age lived through; reaching kMaxAge ends the life.
inline constexpr int kLastLivedAge = kMaxAge - 1;

enum class Sex { male = 0, female = 1 };

/// Annual death probabilities by sex and age 0..119.
class LifeTable
{
public:
    static constexpr int kAges = 120;

    /// Table with the same q for every age and both sexes (tests, synthetic runs).
    static LifeTable constant(double q);

    double q(Sex sex, int age) const;
    void set(Sex sex, int age, double q);

    /// Expected death age for someone alive at `from_age`, under the capped
    /// model (survivors of age kLastLivedAge die at kMaxAge).
    double expected_death_age(Sex sex, int from_age = 25) const;
    /// Probability of being alive at the start of `age` given alive at `from_age`.
    double survival(Sex sex, int age, int from_age = 25) const;

private:
    std::array<std::array<double, kAges>, 2> q_{};
};

/// Read a CSV with columns sex, age, death_probability. Ages 25..100 must be
/// present for both sexes; missing ages outside that range default to 1 above
/// and 0 below. q at the cap age is forced to 1.
LifeTable load_life_table(const std::filesystem::path& file);

/// Death age drawn by walking ages 25..99 with annual probability q; anyone
/// surviving age 99 dies at 100.
int simulate_lifespan(Sex sex, const LifeTable& table, Xoshiro256& rng, int start_age = 25);

struct LifespanPair
{
    int death_age_male = kMaxAge;
    int death_age_female = kMaxAge;

    int household_end_age() const noexcept { return death_age_male > death_age_female ? death_age_male : death_age_female; }
    /// Number of simulated years, start age 25 through min(end age, 99).
    int household_years() const noexcept;
};

/// Members alive during the year at `age` (death happens at year-end).
int alive_count(int age, const LifespanPair& pair) noexcept;

} // namespace homesim
