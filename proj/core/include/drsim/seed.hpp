// SPDX-FileCopyrightText: Copyright (c) 2026 The drsim Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace drsim {

/// splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Counter-based seed derivation: the result depends only on the key tuple,
/// never on evaluation order, so slot workers can run in any order.
constexpr std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> key) noexcept {
    std::uint64_t h = mix64(base);
    for (auto k : key) h = mix64(h ^ mix64(k + 0x632be59bd9b4e019ULL));
    return h;
}

/// Stream tags used as the last element of a derive_seed key.
enum class SeedStream : std::uint64_t {
    InfoBits = 1,
    Pilots = 2,
    Channel = 3,
    Noise = 4,
    Surrogate = 5,
    Profile = 6,
    Residual = 7,
};

constexpr std::uint64_t tag(SeedStream s) noexcept { return static_cast<std::uint64_t>(s); }

using Rng = std::mt19937_64;

/// Uniform double in [0, 1) from the top 53 bits.
inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace drsim
