// Copyright 2026 The circlab Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <compare>
#include <cstdint>
#include <limits>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace circlab
{

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

//! Open interval (lo, hi) on the real line.
struct Interval
{
    double lo = 0.0;
    double hi = 0.0;

    constexpr bool contains(double v) const { return v > lo && v < hi; }
    constexpr double length() const { return hi > lo ? hi - lo : 0.0; }
    constexpr bool empty() const { return !(hi > lo); }
    constexpr bool disjoint_from(Interval const& other) const
    {
        return hi <= other.lo || other.hi <= lo;
    }

    auto operator<=>(Interval const&) const = default;
};

//! Finite union of open intervals.
using IntervalSet = std::vector<Interval>;

inline bool contains(IntervalSet const& set, double v)
{
    for (auto const& iv : set)
    {
        if (iv.contains(v))
            return true;
    }
    return false;
}

std::string to_string(Interval const& iv);

//! Parse "lo,hi" into an interval; throws std::invalid_argument.
Interval parse_interval(std::string const& text);

//! Half-width of the excluded neighbourhoods of 0 and pi.
inline double t0_margin(int n, double multiplier = 1.0)
{
    return multiplier / std::sqrt(static_cast<double>(n));
}

//! Membership in {x in [0, pi] : d(x, {0, pi}) > n^{-1/2}}.
inline bool in_t0(double x, int n, double multiplier = 1.0)
{
    double const m = t0_margin(n, multiplier);
    return x > m && x < kPi - m;
}

//! Pair proximity cutoff n^{-2} (log n)^4, scaled by a multiplier.
inline double pair_cutoff(int n, double multiplier = 1.0)
{
    double const ln = std::log(static_cast<double>(n));
    return multiplier * ln * ln * ln * ln / (static_cast<double>(n) * n);
}

//! Derivative floor n^{3/2} / log n used to flag regular pairs and roots.
inline double derivative_floor(int n)
{
    double const nd = static_cast<double>(n);
    return nd * std::sqrt(nd) / std::log(nd);
}

//! SplitMix64 finalizer; used to derive per-trial seeds.
constexpr std::uint64_t mix64(std::uint64_t x)
{
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

//! Seed for trial `index` of a run with the given base seed.
constexpr std::uint64_t trial_seed(std::uint64_t base, std::uint64_t index)
{
    return mix64(base ^ mix64(index + 0x632BE59BD9B4E019ull));
}

}  // namespace circlab
