#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "crowdcert/error.hpp"

namespace crowdcert {

// Counter-based generator: output i is mix64(key + i * GOLDEN), the SplitMix64
// finalizer over an additive counter sequence. State is two u64s, streams are
// cheap to derive by rehashing the key, and output is identical on every
// platform (no std::distribution involved anywhere).
class Rng {
public:
    explicit Rng(std::uint64_t key) : key_(key) {}

    // Independent stream for the same seed, selected by a short tag.
    static Rng stream(std::uint64_t seed, std::string_view tag) {
        std::uint64_t k = mix64(seed ^ 0x6a09e667f3bcc909ULL);
        for (char c : tag) k = mix64(k ^ static_cast<std::uint64_t>(static_cast<unsigned char>(c)));
        return Rng(k);
    }

    // Seed for cell `index` of a grid job, order-independent across threads.
    static std::uint64_t derive(std::uint64_t seed, std::uint64_t index) {
        return mix64(mix64(seed ^ 0xbb67ae8584caa73bULL) + index);
    }

    static Rng cell_stream(std::uint64_t seed, std::uint64_t index) {
        return Rng(derive(seed, index));
    }

    std::uint64_t next() { return mix64(key_ + ++counter_ * 0x9e3779b97f4a7c15ULL); }

    // Uniform double in [0, 1) with 53 random bits.
    double u01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // Uniform double in [-half_width, half_width].
    double uniform_sym(double half_width) { return (2.0 * u01() - 1.0) * half_width; }

    // Index sampled from an unnormalized nonnegative weight vector.
    int discrete(const std::vector<double>& w) {
        double total = 0.0;
        for (double x : w) total += x;
        if (total <= 0.0) throw Error(Errc::InvalidRange, "discrete() needs positive total weight");
        double u = u01() * total;
        double acc = 0.0;
        for (std::size_t i = 0; i + 1 < w.size(); ++i) {
            acc += w[i];
            if (u < acc) return static_cast<int>(i);
        }
        return static_cast<int>(w.size()) - 1;
    }

    static std::uint64_t mix64(std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

} // namespace crowdcert
