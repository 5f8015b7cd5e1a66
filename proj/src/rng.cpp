#include "mimodf/rng.hpp"

namespace mimodf {

Engine SeedSpec::stream(Hypothesis h, std::uint64_t trial) const
{
    const std::uint64_t lane = h == Hypothesis::H0 ? 0x0ULL : 0x1ULL;
    return Engine(mix64(mix64(master) ^ mix64((trial << 2) | lane)));
}

Engine SeedSpec::auxiliary(std::uint64_t tag) const
{
    return Engine(mix64(mix64(master) ^ mix64((tag << 2) | 0x2ULL)));
}

}  // namespace mimodf
