#pragma once

#include <cstdint>
#include <string_view>

namespace synectic {

// SplitMix64 generator.  Sampling goes through this instead of the
// standard distributions because their output is implementation-defined;
// with a fixed mapping to doubles, equal seeds give byte-identical runs
// on every platform.
struct Rng {
    std::uint64_t state;

    explicit Rng(std::uint64_t seed) : state(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    // Uniform in [lo, hi) built from the top 53 bits.
    double uniform(double lo, double hi) {
        double u = static_cast<double>(next() >> 11) * 0x1.0p-53;
        return lo + (hi - lo) * u;
    }
};

// Derives an independent stream for a named job: FNV-1a over the base
// seed bytes followed by the label bytes.  Each (seed, label) pair owns
// its own sampler, so adding or reordering jobs never shifts another
// job's samples.
inline std::uint64_t derive_seed(std::uint64_t base, std::string_view label) {
    std::uint64_t h = 14695981039346656037ull;
    for (int i = 0; i < 8; ++i) {
        h ^= (base >> (8 * i)) & 0xffu;
        h *= 1099511628211ull;
    }
    for (unsigned char c : label) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

}  // namespace synectic
