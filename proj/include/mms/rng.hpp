#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string_view>

#include "mms/bitvec.hpp"

namespace mms {

/// The one pseudo-random engine used everywhere. Its output sequence is fixed by the
/// C++ standard, and all derived values below are computed from raw engine words
/// (never through std:: distributions, whose algorithms vary between library vendors),
/// so transcripts replay across builds.
using Engine = std::mt19937_64;
inline constexpr std::string_view rng_algorithm_id = "mt19937_64+splitmix64-counter";

inline constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Seed for stream number `counter` under a master seed. Each trial/sample owns its
/// own stream, so the assignment of work to threads cannot change any value.
inline constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t counter) noexcept
{
    return splitmix64(splitmix64(seed) ^ splitmix64(counter + 0x632be59bd9b4e019ULL));
}

inline Engine make_engine(std::uint64_t seed) { return Engine(seed); }

/// Uniform double in [0, 1).
inline double uniform01(Engine& eng) { return static_cast<double>(eng() >> 11) * 0x1.0p-53; }

/// Uniform integer in [0, bound), bound > 0, by rejection.
inline std::uint64_t uniform_below(Engine& eng, std::uint64_t bound)
{
    const std::uint64_t limit = bound * (UINT64_MAX / bound);
    std::uint64_t x;
    do x = eng(); while (x >= limit);
    return x % bound;
}

inline bool coin(Engine& eng) { return (eng() >> 63) != 0; }

/// Standard normal by Box-Muller.
inline double gaussian(Engine& eng)
{
    double u1;
    do u1 = uniform01(eng); while (u1 <= 0.0);
    const double u2 = uniform01(eng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

/// Uniform point of {0,1}^d.
inline BitVector uniform_point(Engine& eng, std::size_t d)
{
    BitVector v(d);
    for (auto& w : v.mutable_words()) w = eng();
    v.clear_tail();
    return v;
}

} // namespace mms
