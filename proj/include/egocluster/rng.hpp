// rng.hpp
//
// Deterministic, platform-independent randomness for seeded pipelines.
// All decisions that must survive re-runs, thread-count changes, and
// machine changes are derived from hash streams keyed by (seed, domain,
// entity) rather than from a shared sequential generator.

#pragma once

#include <cstdint>
#include <cmath>
#include <string_view>

namespace egocluster::rng {

// murmur3 64-bit finalizer
constexpr std::uint64_t fmix64(std::uint64_t x) {
    x ^= x >> 33;
    x *= 0xff51afd7ed558ccdULL;
    x ^= x >> 33;
    x *= 0xc4ceb9fe1a85ec53ULL;
    x ^= x >> 33;
    return x;
}

// FNV-1a over the id text; std::hash is not stable across platforms.
constexpr std::uint64_t hash_id(std::string_view s) {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

// Domain tags keep independent decision streams (ego variant draw, alter
// tie-break, simulator noise, ...) from ever sharing bits.
enum class Domain : std::uint64_t {
    ego_variant   = 0x45474f5641523144ULL,
    alter_tie     = 0x414c544552544945ULL,
    graph_alter   = 0x4752415048414c54ULL,
    outcome_noise = 0x4f5554434f4d4531ULL,
    leakage       = 0x4c45414b41474531ULL,
    edge_drop     = 0x4544474544524f50ULL,
    edge_new      = 0x4e45574544474531ULL,
    alter_new     = 0x4e4557414c544552ULL,
    naive_variant = 0x4e41495645564152ULL,
    naive_split   = 0x4e4149564553504cULL
};

constexpr std::uint64_t stream_key(std::uint64_t seed, Domain domain, std::uint64_t entity) {
    return fmix64(seed ^ fmix64(static_cast<std::uint64_t>(domain) ^ fmix64(entity + 0x9e3779b97f4a7c15ULL)));
}

// Uniform draw in [0, 1) from a single stream key.
constexpr double unit_draw(std::uint64_t seed, Domain domain, std::uint64_t entity) {
    return static_cast<double>(stream_key(seed, domain, entity) >> 11) * 0x1.0p-53;
}

// Counter-based splitmix64; cheap to fork per entity, no shared state.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        state_ += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // Unbiased integer in [0, n) by rejection.
    std::uint64_t below(std::uint64_t n) {
        const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
        std::uint64_t v = next();
        while (v >= limit) v = next();
        return v % n;
    }

    // Box-Muller; the spare cosine draw is discarded to keep the stream
    // position independent of call parity.
    double normal() {
        double u1 = uniform01();
        while (u1 <= 0.0) u1 = uniform01();
        const double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
    }

    double lognormal(double mu, double sigma) { return std::exp(mu + sigma * normal()); }

    // Knuth product method; fine for the small rates used here.
    int poisson(double lambda) {
        const double l = std::exp(-lambda);
        int k = 0;
        double p = 1.0;
        do {
            ++k;
            p *= uniform01();
        } while (p > l);
        return k - 1;
    }

    // Pareto tail: P(X > x) = (xmin / x)^alpha for x >= xmin.
    double pareto(double xmin, double alpha) {
        double u = uniform01();
        while (u >= 1.0) u = uniform01();
        return xmin * std::pow(1.0 - u, -1.0 / alpha);
    }

private:
    std::uint64_t state_;
};

} // namespace egocluster::rng
