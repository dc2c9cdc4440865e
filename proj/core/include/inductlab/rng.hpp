#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

namespace inductlab {

// All randomness in the project flows from one root seed through named
// sub-seeds, so each component (split, init, trial, ...) is independently
// reproducible regardless of execution order.

inline std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t fnv1a(std::string_view s) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::uint64_t derive_seed(std::uint64_t root, std::string_view name) noexcept {
    return splitmix64(root ^ fnv1a(name));
}

inline std::uint64_t derive_seed(std::uint64_t root, std::string_view name,
                                 std::uint64_t index) noexcept {
    return splitmix64(derive_seed(root, name) ^ splitmix64(index));
}

/// Deterministic N(0,1) stream. Box-Muller over explicitly constructed
/// uniforms so the byte-level output does not depend on the standard
/// library's distribution implementations.
class GaussianStream {
public:
    explicit GaussianStream(std::uint64_t seed) : engine_(seed) {}

    double next() {
        double u1 = uniform01();
        if (u1 <= 0.0) u1 = 0x1p-53;
        const double u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        return r * std::cos(6.283185307179586476925286766559 * u2);
    }

    double next(double mean, double stddev) { return mean + stddev * next(); }

private:
    double uniform01() {
        return static_cast<double>(engine_() >> 11) * 0x1p-53;
    }

    std::mt19937_64 engine_;
};

} // namespace inductlab
