#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace fringe {

// Counter-based random stream. Every (seed, stream, substream) triple opens
// an independent, fully specified sequence, so any subset of Monte Carlo
// trials can be recomputed in isolation and results do not depend on how
// trials are partitioned across workers.
class CounterRng {
  public:
    explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0,
                        std::uint64_t substream = 0) {
        state_ = scramble(seed);
        state_ = scramble(state_ + 0x9e3779b97f4a7c15ull * (stream + 1));
        state_ = scramble(state_ + 0xbf58476d1ce4e5b9ull * (substream + 1));
    }

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ull;
        return scramble(state_);
    }

    // Uniform on (0, 1]; never returns 0 so log() is always safe.
    double uniform01() {
        return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
    }

    // Standard normal via Box-Muller, one spare cached per pair.
    double gauss() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = uniform01();
        const double u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    // Poisson by inversion; intended for small means (mean << 30).
    int poisson(double mean) {
        if (mean <= 0.0) return 0;
        const double u = uniform01();
        double p = std::exp(-mean);
        double cdf = p;
        int k = 0;
        while (u > cdf && k < 1000) {
            ++k;
            p *= mean / static_cast<double>(k);
            cdf += p;
        }
        return k;
    }

  private:
    static std::uint64_t scramble(std::uint64_t z) {
        z ^= z >> 30;
        z *= 0xbf58476d1ce4e5b9ull;
        z ^= z >> 27;
        z *= 0x94d049bb133111ebull;
        z ^= z >> 31;
        return z;
    }

    std::uint64_t state_ = 0;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace fringe
