#ifndef FLEETSIM_RNG_HPP
#define FLEETSIM_RNG_HPP

#include <cassert>
#include <cstdint>
#include <random>
#include <vector>

namespace fleetsim {

// splitmix64 finalizer. Same bits on every platform.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Seed for run k of an ensemble: mix64(master + (k+1) * golden ratio).
inline std::uint64_t derive_run_seed(std::uint64_t master_seed, std::uint64_t run_index) {
    return mix64(master_seed + 0x9e3779b97f4a7c15ULL * (run_index + 1));
}

// mt19937_64 is fully pinned by the standard; the distribution helpers here
// are hand-rolled because std::uniform_int_distribution is not portable
// bit-for-bit.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // [0, 1) with 53 random bits
    double uniform01() { return double(next_u64() >> 11) * 0x1.0p-53; }

    // unbiased draw from [0, n), n >= 1, via rejection
    std::uint64_t below(std::uint64_t n) {
        assert(n >= 1);
        if (n == 1) return 0;
        std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t x;
        do {
            x = next_u64();
        } while (x >= limit);
        return x % n;
    }

    // inclusive range
    int uniform_int(int lo, int hi) {
        assert(lo <= hi);
        return lo + int(below(std::uint64_t(hi) - std::uint64_t(lo) + 1));
    }

    // inverse-CDF draw over a cumulative weight vector (ascending, last ~1).
    // Zero-weight entries occupy empty intervals and are never selected.
    std::size_t sample_cdf(const std::vector<double>& cdf) {
        assert(!cdf.empty());
        double u = uniform01();
        std::size_t lo = 0, hi = cdf.size();
        while (lo < hi) {
            std::size_t mid = (lo + hi) / 2;
            if (cdf[mid] > u)
                hi = mid;
            else
                lo = mid + 1;
        }
        if (lo >= cdf.size()) lo = cdf.size() - 1; // guard: u beyond cdf.back()
        return lo;
    }

private:
    std::mt19937_64 engine_;
};

} // namespace fleetsim

#endif
