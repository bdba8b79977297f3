#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace homesim {

/// SplitMix64 finalizer; also used to derive substream seeds.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// xoshiro256** engine. Satisfies UniformRandomBitGenerator so it plugs into
/// the <random> distributions.
class Xoshiro256
{
public:
    using result_type = std::uint64_t;

    explicit Xoshiro256(std::uint64_t seed) noexcept
    {
        for (auto& word : state_) {
            seed = splitmix64(seed);
            word = seed;
        }
    }

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    result_type operator()() noexcept
    {
        const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    /// Uniform double in [0, 1) with 53 bits of precision.
    double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

private:
    static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept
    {
        return (x << k) | (x >> (64 - k));
    }

    std::array<std::uint64_t, 4> state_{};
};

/// Named substreams of one household. Each stream is a pure function of
/// (master_seed, household_index, stream), so results do not depend on the
/// order in which households are simulated.
enum class Stream : std::uint64_t {
    lifespan_male = 1,
    lifespan_female = 2,
    income_male = 3,
    income_female = 4,
    economy = 5,
};

inline Xoshiro256 substream(std::uint64_t master_seed, std::uint64_t household_index, Stream stream) noexcept
{
    std::uint64_t key = splitmix64(master_seed);
    key = splitmix64(key ^ household_index);
    key = splitmix64(key ^ static_cast<std::uint64_t>(stream));
    return Xoshiro256{key};
}

} // namespace homesim
