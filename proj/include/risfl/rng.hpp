#pragma once

#include <cmath>
#include <complex>
#include <cstdint>

namespace risfl {

// xoshiro256++ seeded through splitmix64. All randomness in the project
// funnels through this class so that a (config, seed) pair replays exactly,
// independent of the platform's std::distribution implementations.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : seed_(seed) {
        std::uint64_t x = seed;
        for (auto& w : state_) w = splitmix64(x);
        has_spare_ = false;
        spare_ = 0.0;
    }

    std::uint64_t next() {
        const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // [0, 1)
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // [0, n) without modulo bias
    std::uint64_t uniform_int(std::uint64_t n) {
        const std::uint64_t threshold = (0 - n) % n;
        for (;;) {
            const std::uint64_t r = next();
            if (r >= threshold) return r % n;
        }
    }

    // standard normal, Box-Muller with cached second draw
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * pi_ * u2;
        spare_ = r * std::sin(a);
        has_spare_ = true;
        return r * std::cos(a);
    }

    double normal(double mean, double stddev) { return mean + stddev * normal(); }

    // circularly-symmetric complex Gaussian with unit variance, E|z|^2 = 1
    std::complex<double> cnormal() {
        const double re = normal();
        const double im = normal();
        return {re * inv_sqrt2_, im * inv_sqrt2_};
    }

    // Independent stream derived from the original seed and a tag; does not
    // advance this generator.
    Rng fork(std::uint64_t tag) const {
        std::uint64_t x = seed_ ^ (0x9E3779B97F4A7C15ull * (tag + 1));
        return Rng(splitmix64(x));
    }

    std::uint64_t seed() const { return seed_; }

  private:
    static std::uint64_t splitmix64(std::uint64_t& x) {
        x += 0x9E3779B97F4A7C15ull;
        std::uint64_t z = x;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    static constexpr double pi_ = 3.14159265358979323846;
    static constexpr double inv_sqrt2_ = 0.70710678118654752440;

    std::uint64_t state_[4];
    std::uint64_t seed_;
    bool has_spare_;
    double spare_;
};

}  // namespace risfl
