#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

namespace icudo {

// Deterministic splittable PRNG (splitmix64 core).
//
// Every randomized operation in the library takes an Rng (or a seed) and is a
// pure function of it. Independent sub-streams are derived with child(tag)
// from the stream's root seed, not from its draw position, so the result of a
// parallel computation does not depend on scheduling: worker r always sees
// rng.child(r) no matter which thread runs it or how many draws the siblings
// consumed.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : root_(seed), state_(seed) {}

    static std::uint64_t mix(std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Independent stream keyed by (root, tag). Stable under reordering.
    Rng child(std::uint64_t tag) const {
        return Rng(mix(root_ ^ mix(tag ^ 0xa0761d6478bd642fULL)));
    }
    Rng child2(std::uint64_t a, std::uint64_t b) const { return child(a).child(b); }

    std::uint64_t root() const { return root_; }

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform on [0,1), 53-bit resolution.
    double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform on (0,1]; safe as a log() argument.
    double next_unit_open() {
        return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
    }

    // Unbiased integer in [0, bound), bound >= 1 (Lemire multiply-shift).
    std::uint64_t next_below(std::uint64_t bound) {
        unsigned __int128 m = static_cast<unsigned __int128>(next_u64()) * bound;
        auto lo = static_cast<std::uint64_t>(m);
        if (lo < bound) {
            const std::uint64_t t = (0 - bound) % bound;
            while (lo < t) {
                m = static_cast<unsigned __int128>(next_u64()) * bound;
                lo = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64);
    }

    int next_int(int bound) { return static_cast<int>(next_below(static_cast<std::uint64_t>(bound))); }

    // Standard normal via Box-Muller; consumes exactly two draws.
    double next_normal() {
        const double u1 = next_unit_open();
        const double u2 = next_unit();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = next_below(i);
            std::swap(v[i - 1], v[j]);
        }
    }

    // First k entries of a uniform random permutation of {0,...,n-1}.
    std::vector<int> sample_indices(int n, int k) {
        std::vector<int> idx(n);
        std::iota(idx.begin(), idx.end(), 0);
        for (int i = 0; i < k; ++i) {
            int j = i + next_int(n - i);
            std::swap(idx[i], idx[j]);
        }
        idx.resize(k);
        return idx;
    }

  private:
    std::uint64_t root_;
    std::uint64_t state_;
};

}  // namespace icudo
