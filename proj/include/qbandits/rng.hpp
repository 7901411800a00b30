#pragma once

#include <cstdint>
#include <initializer_list>

namespace qbandits {

// Counter-based pseudo-random stream (splitmix64). Streams are cheap to
// derive: child(key) hashes the stream's identity seed with the key, so a
// child never depends on how much the parent has been consumed. This is what
// makes per-(run, arm) substreams reproducible independent of pull order and
// worker count.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed) : seed_(seed), state_(seed) {}

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ULL;
        return mix(state_);
    }

    // Uniform in [0, 1), 53 random bits.
    double next_unit() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Independent substream keyed on this stream's identity, not its state.
    RngStream child(std::uint64_t key) const {
        return RngStream(mix(seed_ ^ mix(key + 0x9e3779b97f4a7c15ULL)));
    }

    RngStream child(std::uint64_t key_a, std::uint64_t key_b) const {
        return child(key_a).child(key_b);
    }

    std::uint64_t seed() const { return seed_; }

    static std::uint64_t mix(std::uint64_t z) {
        z ^= z >> 30;
        z *= 0xbf58476d1ce4e5b9ULL;
        z ^= z >> 27;
        z *= 0x94d049bb133111ebULL;
        z ^= z >> 31;
        return z;
    }

private:
    std::uint64_t seed_;
    std::uint64_t state_;
};

} // namespace qbandits
