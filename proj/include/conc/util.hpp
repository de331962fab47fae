#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace conc {

// Compensated (Kahan) accumulator. Merging chunk partials in a fixed order
// keeps parallel reductions bit-identical to sequential ones.
struct KahanSum {
    double sum = 0.0;
    double carry = 0.0;

    void add(double x) {
        const double y = x - carry;
        const double t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
    double value() const { return sum; }
};

std::vector<double> linspace(double lo, double hi, std::size_t count);

std::uint64_t fnv1a64(std::string_view data);
std::string to_hex(std::uint64_t value);

}  // namespace conc
