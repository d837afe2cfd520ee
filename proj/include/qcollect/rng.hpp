// rng.hpp
// Deterministic, splittable pseudo-random stream. Used everywhere results
// must be byte-identical across platforms and standard libraries (the
// std:: distributions are implementation-defined).

#pragma once

#include <cstdint>

namespace qcollect {

// splitmix64 (Vigna). Passes BigCrush, two ops per draw.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform double in [0, 1) with 53 random bits.
    double uniform01() {
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    }

    // Derive an independent stream for a sub-task. Mixing the key through
    // the generator makes streams for distinct keys uncorrelated.
    SplitMix64 split(std::uint64_t key) const {
        SplitMix64 mixer(state_ ^ (0x9e3779b97f4a7c15ULL * (key + 1)));
        mixer.next();
        return SplitMix64(mixer.next());
    }

private:
    std::uint64_t state_;
};

}  // namespace qcollect
