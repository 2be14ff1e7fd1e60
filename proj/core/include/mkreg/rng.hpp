#pragma once

#include <cmath>
#include <cstdint>

namespace mkreg {

// Counter-based generator with hand-rolled variate transforms so that streams
// are reproducible bit-for-bit across platforms and standard-library versions
// (std::normal_distribution is implementation-defined).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    // splitmix64 step.
    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform on [0, 1).
    double uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Uniform on [0, 1); never exactly 0 (safe for logs).
    double uniform_pos() {
        double u;
        do {
            u = uniform();
        } while (u == 0.0);
        return u;
    }

    // Standard normal via Box-Muller; one fresh pair of uniforms per call so
    // the stream position does not depend on caller interleaving.
    double gaussian() {
        const double u1 = uniform_pos();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
    }

    // Zero-mean Laplace with unit variance (scale 1/sqrt(2)).
    double laplace_unit_variance() {
        const double u = uniform_pos();
        const double v = uniform();
        const double e = -std::log(u) / std::sqrt(2.0);
        return v < 0.5 ? -e : e;
    }

private:
    std::uint64_t state_;
};

// Documented per-trial stream derivation: a splitmix64 finalizer applied to
// master_seed xor a multiplied trial index. Parallel and serial execution see
// identical streams.
inline std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t trial_index) {
    std::uint64_t z = master_seed ^ (0x9e3779b97f4a7c15ULL * (trial_index + 1));
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

} // namespace mkreg
