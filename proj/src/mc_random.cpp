#include "conc/mc_random.hpp"

namespace conc::rng {

// SplitMix64 stream: state seed + (counter+1)*golden gamma, then the usual
// finalizer. Distinct counters give statistically independent outputs.
std::uint64_t mix(std::uint64_t seed, std::uint64_t counter) {
    std::uint64_t z = seed + (counter + 1) * 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

double unit_double(std::uint64_t seed, std::uint64_t counter) {
    return static_cast<double>(mix(seed, counter) >> 11) * 0x1.0p-53;
}

double CounterStream::next_unit() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

std::uint64_t CounterStream::below(std::uint64_t bound) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next_u64()) * bound) >> 64);
}

}  // namespace conc::rng
