#pragma once

#include "torusflow/geometry.hpp"

#include <cmath>
#include <cstdint>
#include <random>

namespace torusflow {

/// Platform-independent sampling on top of mt19937_64. The standard
/// distributions are implementation-defined, so everything here is built from
/// raw 64-bit draws to keep outputs byte-identical across toolchains.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Seed for the i-th independent job of a batch.
    static std::uint64_t derive(std::uint64_t seed, std::uint64_t index) {
        std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, 1).
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    double normal() {
        // Box-Muller; 1 - uniform() is in (0, 1].
        const double u1 = 1.0 - uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
    }

    Vec normal_vector(int d) {
        Vec v(d);
        for (int i = 0; i < d; ++i) v[i] = normal();
        return v;
    }

    Vec unit_vector(int d) {
        Vec v = normal_vector(d);
        while (v.norm() == 0.0) v = normal_vector(d);
        return v / v.norm();
    }

    Vec angles(int n) {
        Vec v(n);
        for (int i = 0; i < n; ++i) v[i] = uniform(0.0, kTwoPi);
        return v;
    }

    /// Uniform in the closed ball of radius r.
    Vec ball_point(int d, double r) {
        return unit_vector(d) * (r * std::pow(uniform(), 1.0 / d));
    }

    /// Uniform in the annulus r_min <= |x| <= r_max.
    Vec annulus_point(int d, double r_min, double r_max) {
        const double a = std::pow(r_min, d), b = std::pow(r_max, d);
        return unit_vector(d) * std::pow(a + (b - a) * uniform(), 1.0 / d);
    }

    Vec sphere_point(int d = 6) { return unit_vector(d); }

    std::uint64_t next() { return engine_(); }

private:
    std::mt19937_64 engine_;
};

}  // namespace torusflow
