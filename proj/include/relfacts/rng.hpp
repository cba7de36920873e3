#ifndef RELFACTS_RNG_HPP
#define RELFACTS_RNG_HPP

#include <cstdint>

namespace relfacts {

// splitmix64: same seed, same stream, on every platform.
class SplitMix64 {
public:
    SplitMix64() = default;
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1) with 53 random bits.
    double next_double() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    std::uint64_t state() const { return state_; }

    bool operator==(const SplitMix64&) const = default;

private:
    std::uint64_t state_ = 0;
};

}  // namespace relfacts

#endif
