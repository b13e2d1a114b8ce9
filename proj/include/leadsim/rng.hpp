#pragma once

#include <cmath>
#include <cstdint>

namespace leadsim {

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace detail

/// xoshiro256** seeded through splitmix64. Self-contained so that streams
/// are bit-identical across platforms; std <random> distributions are
/// implementation-defined and would break record reproducibility.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : seed_(seed) {
        std::uint64_t sm = seed;
        for (auto& w : s_) w = detail::splitmix64(sm);
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = detail::rotl(s_[1] * 5, 7) * 9;
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = detail::rotl(s_[3], 45);
        return result;
    }

    /// Uniform double in [0, 1).
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Standard normal via Box-Muller. Always consumes two uniforms so the
    /// draw count per call is fixed.
    double normal() {
        double u1 = uniform();
        const double u2 = uniform();
        if (u1 <= 0.0) u1 = 0x1.0p-53;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.141592653589793 * u2);
    }

    double normal(double mean, double sd) { return mean + sd * normal(); }

    double exponential(double mean) {
        double u = uniform();
        if (u >= 1.0) u = 1.0 - 0x1.0p-53;
        return -mean * std::log(1.0 - u);
    }

    bool bernoulli(double p) { return uniform() < p; }

    /// Index in [0, n) from cumulative weights; weights need not be normalized.
    template <typename Container>
    int weighted_index(const Container& weights) {
        double total = 0.0;
        for (double w : weights) total += w;
        double r = uniform() * total;
        int i = 0;
        const int n = static_cast<int>(weights.size());
        for (; i < n - 1; ++i) {
            r -= weights[static_cast<std::size_t>(i)];
            if (r < 0.0) break;
        }
        return i;
    }

    /// Deterministically mix a key into a base seed; same inputs always
    /// yield the same derived seed, which trial/agent splitting relies on.
    static std::uint64_t derive_seed(std::uint64_t base, std::uint64_t key) {
        std::uint64_t k = key ^ 0xd1b54a32d192ed03ULL;
        return base ^ detail::splitmix64(k);
    }

    /// Derive an independent child stream.
    Rng child(std::uint64_t key) const { return Rng(derive_seed(seed_, key)); }

    std::uint64_t seed() const { return seed_; }

private:
    std::uint64_t seed_;
    std::uint64_t s_[4];
};

}  // namespace leadsim
