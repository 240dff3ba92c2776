#pragma once

#include <cmath>
#include <cstdint>

namespace phaseslip {

// Counter-friendly generator with a cheap, well-mixed seeding path, so a
// stream can be derived from (seed, dt index, shot index) and results do not
// depend on execution order. Output sequence is platform independent.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    static std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
        SplitMix64 g(a ^ (0x9e3779b97f4a7c15ULL + (b << 1)));
        g.next();
        return g.next();
    }

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1).
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // Uniform in (0, 1], safe for log().
    double uniform_pos() { return 1.0 - uniform(); }

    double exponential(double rate) { return -std::log(uniform_pos()) / rate; }

private:
    std::uint64_t state_;
};

} // namespace phaseslip
