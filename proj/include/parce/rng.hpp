// Deterministic hashing RNG. All stochastic behavior in the project flows
// through these helpers so results are reproducible across platforms and
// standard library implementations (std::uniform_real_distribution is not
// portable across vendors).
#pragma once

#include <cstdint>

namespace parce {

// splitmix64 finalizer; good avalanche, cheap.
inline std::uint64_t hash_u64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t hash_combine(std::uint64_t a, std::uint64_t b) {
    return hash_u64(a ^ (b + 0x9e3779b97f4a7c15ULL + (a << 6) + (a >> 2)));
}

// Uniform double in [0, 1) from the top 53 bits.
inline double u64_to_unit(std::uint64_t x) {
    return static_cast<double>(x >> 11) * 0x1.0p-53;
}

// Counter-based stream: n-th draw of a seeded stream, no mutable state.
inline double unit_at(std::uint64_t seed, std::uint64_t n) {
    return u64_to_unit(hash_combine(seed, n));
}

// Small sequential generator for sampling loops.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(hash_u64(seed ^ 0xa5a5a5a5deadbeefULL)) {}

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ULL;
        return hash_u64(state_);
    }

    double uniform() { return u64_to_unit(next_u64()); }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Uniform integer in [0, n).
    std::uint64_t uniform_index(std::uint64_t n) {
        return static_cast<std::uint64_t>(uniform() * static_cast<double>(n)) % n;
    }

private:
    std::uint64_t state_;
};

}  // namespace parce
