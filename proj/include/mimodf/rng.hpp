#pragma once

#include <cstdint>
#include <random>

#include "mimodf/protocol.hpp"

namespace mimodf {

using Engine = std::mt19937_64;

/// Master seed plus the rule mapping (hypothesis, trial) to an independent
/// stream. A trial's draws never depend on which worker runs it.
struct SeedSpec {
    std::uint64_t master = 0x5eed5eedULL;

    Engine stream(Hypothesis h, std::uint64_t trial) const;
    /// Stream for auxiliary runs (e.g. the threshold-grid pilot) that must
    /// not collide with trial streams.
    Engine auxiliary(std::uint64_t tag) const;
};

/// splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z)
{
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace mimodf
