#pragma once

#include <cstdint>

namespace hetsim {

// Counter-based pseudo-random stream. The i-th output is a pure function of
// (key, i), so streams derived from distinct (seed, stream-id) pairs are
// independent: adding an entity to a simulation never shifts the draws seen
// by any other entity.
//
// Stream-id conventions used by the simulator:
//   terminal chain steps  (seed, terminal_id)
//   per-link loss draws   (seed, kLinkSalt + link_id)
class RandomStream {
public:
    static constexpr std::uint64_t kLinkSalt = 0x10000000000ULL;

    RandomStream() = default;

    RandomStream(std::uint64_t seed, std::uint64_t stream)
        : key_(mix(seed + kGamma) ^ mix(stream * 0xda942042e4dd58b5ULL + kGamma)) {}

    std::uint64_t next_u64() { return mix(key_ + (++counter_) * kGamma); }

    // Uniform in [0, 1), 53 random bits.
    double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Number of draws consumed so far.
    std::uint64_t draws() const { return counter_; }

    // Derived stream, independent of this one and of other lanes.
    RandomStream substream(std::uint64_t lane) const { return RandomStream(key_, lane); }

private:
    // 64-bit finalizer (murmur3 variant); full avalanche.
    static constexpr std::uint64_t mix(std::uint64_t z) {
        z ^= z >> 33;
        z *= 0xff51afd7ed558ccdULL;
        z ^= z >> 33;
        z *= 0xc4ceb9fe1a85ec53ULL;
        z ^= z >> 33;
        return z;
    }

    static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;

    std::uint64_t key_ = 0;
    std::uint64_t counter_ = 0;
};

} // namespace hetsim
