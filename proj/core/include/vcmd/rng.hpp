#pragma once

#include <cmath>
#include <cstdint>

namespace vcmd {

/// Deterministic splitmix64 stream. Used instead of <random> engines so
/// that results are bit-reproducible across standard library versions.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    /// Derives an independent stream from (seed, a, b), e.g. per slab and
    /// iteration.
    static Rng derive(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
        Rng mix(seed);
        std::uint64_t s = mix.next();
        s ^= 0x9e3779b97f4a7c15ULL * (a + 1);
        Rng mix2(s);
        s = mix2.next() ^ (0xbf58476d1ce4e5b9ULL * (b + 1));
        return Rng(s);
    }

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, n), n > 0. Multiply-shift bounding; the bias of at
    /// most 2^-64 per draw is irrelevant here and the result is portable.
    std::uint64_t bounded(std::uint64_t n) {
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(next()) * n) >> 64);
    }

    /// Uniform integer in [lo, hi] inclusive.
    std::int64_t range(std::int64_t lo, std::int64_t hi) {
        return lo + static_cast<std::int64_t>(
                        bounded(static_cast<std::uint64_t>(hi - lo + 1)));
    }

    /// Uniform in [0,1).
    double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /// Standard normal via Box-Muller.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = unit(), u2 = unit();
        while (u1 <= 0.0) u1 = unit();
        const double mag = std::sqrt(-2.0 * std::log(u1));
        const double ang = 6.283185307179586476925286766559 * u2;
        spare_ = mag * std::sin(ang);
        have_spare_ = true;
        return mag * std::cos(ang);
    }

private:
    std::uint64_t state_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

} // namespace vcmd
