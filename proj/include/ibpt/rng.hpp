#pragma once
// Deterministic random number generation. Everything that consumes randomness
// in this library goes through these generators so that a (seed, ordinal)
// pair reproduces bit-identical streams independent of platform stdlib and
// of how work is split across threads.

#include <cstdint>
#include <vector>

#include "ibpt/common.hpp"

namespace ibpt {

inline uint64_t splitmix64(uint64_t& state) {
    uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// per-cell seed derivation: master seed mixed with a cell ordinal
inline uint64_t derive_seed(uint64_t master, uint64_t ordinal) {
    uint64_t s = master;
    uint64_t a = splitmix64(s);
    s = master ^ (0x9e3779b97f4a7c15ULL * (ordinal + 1));
    uint64_t b = splitmix64(s);
    return a ^ (b + 0x165667b19e3779f9ULL + (a << 6) + (a >> 2));
}

class Rng {
  public:
    explicit Rng(uint64_t seed) {
        uint64_t sm = seed;
        for (auto& w : s_) w = splitmix64(sm);
    }

    // xoshiro256++
    uint64_t next() {
        const uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // uniform double in [0,1) with 53 random bits
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // uniform double in (0,1), never exactly 0
    double uniform_pos() {
        double u;
        do { u = uniform(); } while (u == 0.0);
        return u;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    uint64_t below(uint64_t bound) {  // unbiased via rejection
        const uint64_t limit = bound * (UINT64_MAX / bound);
        uint64_t r;
        do { r = next(); } while (r >= limit);
        return r % bound;
    }

  private:
    static uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
    uint64_t s_[4];
};

// Inverse-CDF sampler for a fixed discrete distribution (binary search on the
// cumulative table). Used for Hamming-distance draws.
class DiscreteSampler {
  public:
    DiscreteSampler(std::vector<double> weights, int first_value)
        : first_(first_value), cdf_(std::move(weights)) {
        double total = 0.0;
        for (auto& w : cdf_) { total += w; w = total; }
        if (total <= 0.0) throw domain_error("DiscreteSampler: zero total weight");
        for (auto& c : cdf_) c /= total;
        cdf_.back() = 1.0;
    }

    int operator()(Rng& rng) const {
        const double u = rng.uniform();
        size_t lo = 0, hi = cdf_.size() - 1;
        while (lo < hi) {
            const size_t mid = (lo + hi) / 2;
            if (cdf_[mid] <= u) lo = mid + 1; else hi = mid;
        }
        return first_ + static_cast<int>(lo);
    }

  private:
    int first_;
    std::vector<double> cdf_;
};

}  // namespace ibpt
