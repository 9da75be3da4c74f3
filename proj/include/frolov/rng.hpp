#pragma once

// Seedable, platform-independent random streams. Replication studies need
// bit-for-bit reproducible streams derived from (base_seed, n_index, rep_index),
// so we avoid std::uniform_real_distribution (implementation-defined) and use
// a splitmix64 stream with an explicit derivation function. The derivation
// function is part of the results-file contract (see README).

#include <cstdint>

namespace frolov {

inline std::uint64_t mix64(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ull;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBull;
    z ^= z >> 31;
    return z;
}

// Stream seed for replication (rep_index) of grid entry (n_index) under base_seed.
inline std::uint64_t derive_stream_seed(std::uint64_t base_seed,
                                        std::uint64_t n_index,
                                        std::uint64_t rep_index) {
    std::uint64_t s = mix64(base_seed + 0x9E3779B97F4A7C15ull);
    s = mix64(s ^ (n_index + 0xD1B54A32D192ED03ull));
    s = mix64(s ^ (rep_index + 0x8CB92BA72F3D8DD7ull));
    return s;
}

class RandomStream {
public:
    explicit RandomStream(std::uint64_t derived_seed, std::uint64_t replication_index = 0)
        : state_(derived_seed), seed_(derived_seed), replication_(replication_index) {}

    std::uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ull;
        return mix64(state_);
    }

    // Uniform on [0, 1), 53 random bits.
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    std::uint64_t seed() const { return seed_; }
    std::uint64_t replication() const { return replication_; }

private:
    std::uint64_t state_;
    std::uint64_t seed_;
    std::uint64_t replication_;
};

} // namespace frolov
