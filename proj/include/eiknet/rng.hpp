#pragma once

#include <cstdint>
#include <random>

namespace eiknet {

// Deterministic random stream. Values are derived from the raw mt19937_64
// words so sequences are identical across platforms and standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    double uniform() { // [0, 1)
        return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
    }
    double range(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    int pick(int n) { return static_cast<int>(eng_() % static_cast<std::uint64_t>(n)); }
    std::uint64_t word() { return eng_(); }

private:
    std::mt19937_64 eng_;
};

} // namespace eiknet
