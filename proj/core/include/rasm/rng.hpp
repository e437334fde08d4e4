#ifndef RASM_RNG_HPP
#define RASM_RNG_HPP

#include <cmath>
#include <cstdint>

namespace rasm {

/**
 * Counter-based 64-bit generator: the SplitMix64 output permutation applied
 * to an affine counter stream.  output(i) = mix(seed + GOLDEN * (i+1)).
 * Sequences are a pure function of (seed, counter), bit-identical across
 * platforms, and cheap to fork by offsetting the counter.
 */
class CounterRng {
  public:
    explicit CounterRng(std::uint64_t seed, std::uint64_t counter = 0)
        : seed_(seed), counter_(counter) {}

    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    std::uint64_t next_u64() { return mix(seed_ + 0x9E3779B97F4A7C15ull * ++counter_); }

    std::uint64_t counter() const { return counter_; }
    std::uint64_t seed() const { return seed_; }

    // Uniform in (0,1]: 53 mantissa bits, never exactly 0 so -log is safe.
    double uniform() {
        std::uint64_t u = next_u64() >> 11;
        return static_cast<double>(u + 1) * 0x1.0p-53;
    }

    double exponential(double rate) { return -std::log(uniform()) / rate; }

    // Unbiased integer in [0, n) via rejection.
    std::uint64_t below(std::uint64_t n) {
        if (n == 0) return 0;
        std::uint64_t limit = ~0ull - ~0ull % n;
        std::uint64_t u;
        do {
            u = next_u64();
        } while (u >= limit);
        return u % n;
    }

  private:
    std::uint64_t seed_;
    std::uint64_t counter_;
};

}  // namespace rasm

#endif
