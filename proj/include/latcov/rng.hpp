#pragma once

#include <cstdint>

namespace latcov {

// SplitMix64 as a counter-based generator: output i of a stream is
// mix(key + (i+1) * golden).  split() derives an independent key from a tag,
// so subsystems can draw without sharing one sequential stream.
class Rng {
public:
    explicit Rng(uint64_t seed) : key_(mix(seed ^ 0x6a09e667f3bcc909ULL)) {}

    static uint64_t mix(uint64_t z) {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    uint64_t next() {
        ++ctr_;
        return mix(key_ + ctr_ * kGolden);
    }

    uint64_t at(uint64_t i) const { return mix(key_ + (i + 1) * kGolden); }

    Rng split(uint64_t tag) const {
        Rng r(0);
        r.key_ = mix(key_ ^ mix(tag + kGolden));
        return r;
    }

    // Uniform in [0, n), n > 0, by rejection.
    uint64_t below(uint64_t n) {
        uint64_t lim = UINT64_MAX - UINT64_MAX % n;
        for (;;) {
            uint64_t x = next();
            if (x < lim) return x % n;
        }
    }

private:
    static constexpr uint64_t kGolden = 0x9e3779b97f4a7c15ULL;
    uint64_t key_;
    uint64_t ctr_ = 0;
};

}  // namespace latcov
