#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace idtraj {

// splitmix64; used both as a seed expander and as a stable hash mixer.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

// All stochastic code draws through this wrapper so that a (seed, call
// sequence) pair fully determines every artifact.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(mix64(seed)) {}

    // Uniform on the open interval (0, 1).
    double uniform() {
        const std::uint64_t r = gen_();
        return (static_cast<double>(r >> 11) + 0.5) * 0x1.0p-53;
    }

    // Uniform integer in [0, n).
    std::uint64_t uniform_index(std::uint64_t n) {
        std::uniform_int_distribution<std::uint64_t> dist(0, n - 1);
        return dist(gen_);
    }

    bool bernoulli(double p) { return uniform() < p; }

    std::mt19937_64& engine() { return gen_; }

private:
    std::mt19937_64 gen_;
};

// Deterministic substream derivation: every (model, day, product) simulation
// cell owns an independent seed derived from the master seed.
inline std::uint64_t substream_seed(std::uint64_t master, std::string_view tag,
                                    std::int64_t a = 0, std::int64_t b = 0) {
    std::uint64_t h = mix64(master ^ fnv1a(tag));
    h = mix64(h ^ static_cast<std::uint64_t>(a));
    h = mix64(h ^ static_cast<std::uint64_t>(b));
    return h;
}

}  // namespace idtraj
