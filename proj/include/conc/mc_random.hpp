#pragma once

#include <cstdint>

namespace conc::rng {

// Counter-based generator: the value for a given (seed, counter) pair is a
// pure function of its arguments, so samples can be drawn in any order (or
// in parallel) and still reproduce the sequential stream bit for bit.
std::uint64_t mix(std::uint64_t seed, std::uint64_t counter);

// Uniform double in [0, 1) with 53 random bits.
double unit_double(std::uint64_t seed, std::uint64_t counter);

// Convenience cursor over the counter space for sequential generation.
class CounterStream {
public:
    explicit CounterStream(std::uint64_t seed) : seed_(seed) {}

    std::uint64_t next_u64() { return mix(seed_, counter_++); }
    double next_unit();
    // Unbiased-enough integer in [0, bound) via 128-bit multiply.
    std::uint64_t below(std::uint64_t bound);

private:
    std::uint64_t seed_;
    std::uint64_t counter_ = 0;
};

}  // namespace conc::rng
