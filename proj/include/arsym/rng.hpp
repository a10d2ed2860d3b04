#pragma once

#include <cstdint>
#include <random>

namespace arsym {

// Derives an independent stream seed from a master seed.  splitmix64
// finalizer over master advanced by the golden-ratio constant per stream;
// used for per-replication and per-path seeding so that results do not
// depend on how work is split across threads.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
    std::uint64_t z = master + 0x9E3779B97F4A7C15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Deterministic generator used everywhere.  uniform01() is strictly inside
// (0,1) so that CDF inversion never hits an endpoint.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    double uniform01() {
        return (static_cast<double>(eng_() >> 11) + 0.5) * 0x1.0p-53;
    }

    std::uint64_t next_u64() { return eng_(); }

private:
    std::mt19937_64 eng_;
};

}  // namespace arsym
