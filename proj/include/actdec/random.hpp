#pragma once

#include <Eigen/Core>
#include <cmath>
#include <cstdint>
#include <random>

namespace actdec {

// Mixes two 64-bit values into a child seed (splitmix64 finalizer).
inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
    std::uint64_t z = a + 0x9e3779b97f4a7c15ULL * (b + 0x632be59bd9b4e019ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Seeded random stream: mt19937_64 core with explicit Box-Muller normals.
// The mt19937_64 sequence is fixed by the standard, and the uniform/normal
// mappings below avoid std::*_distribution, whose output is
// implementation-defined; a given seed therefore reproduces the same draws
// on every build using the same libm.
//
// Streams are never shared between workers: derive() children instead.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed) : seed_(seed), engine_(seed) {}

    std::uint64_t seed() const { return seed_; }

    std::uint64_t next_u64() { return engine_(); }

    // Uniform on [0, 1), 53-bit resolution.
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    // Uniform on [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // Standard normal via Box-Muller; second value of each pair is cached.
    double gaussian() {
        if (has_cache_) {
            has_cache_ = false;
            return cache_;
        }
        const double u1 = 1.0 - uniform01();  // (0, 1]
        const double u2 = uniform01();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 6.283185307179586476925286766559 * u2;
        cache_ = radius * std::sin(angle);
        has_cache_ = true;
        return radius * std::cos(angle);
    }

    void gaussian_fill(Eigen::ArrayXd& out) {
        for (Eigen::Index i = 0; i < out.size(); ++i) out[i] = gaussian();
    }

    Eigen::ArrayXd gaussian_vec(int n) {
        Eigen::ArrayXd out(n);
        gaussian_fill(out);
        return out;
    }

    // Child stream; deterministic in (parent seed, tag), does not advance
    // the parent. Children with distinct tags are independent for all
    // practical purposes.
    RandomStream derive(std::uint64_t tag) const { return RandomStream(mix_seed(seed_, tag)); }
    RandomStream derive(std::uint64_t tag1, std::uint64_t tag2) const {
        return RandomStream(mix_seed(mix_seed(seed_, tag1), tag2));
    }

private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
    double cache_ = 0.0;
    bool has_cache_ = false;
};

}  // namespace actdec
