#pragma once

#include <cstdint>
#include <string_view>

namespace kbclean {

inline constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

// splitmix64 finalizer; full avalanche on 64 bits.
constexpr std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// FNV-1a over the bytes, finalized with mix64. No platform-dependent state,
// so the same (string, seed) gives the same value everywhere.
constexpr std::uint64_t hash64(std::string_view s, std::uint64_t seed) {
    std::uint64_t h = 0xcbf29ce484222325ULL ^ mix64(seed ^ kGolden);
    for (unsigned char c : s) {
        h = (h ^ c) * 0x100000001b3ULL;
    }
    return mix64(h ^ (static_cast<std::uint64_t>(s.size()) << 1));
}

// Seeded family of independent hash functions, indexed by stream id.
// The algorithm tag is part of the signature-cache header so stale caches
// from a different scheme never validate.
struct HashFamily {
    std::uint64_t seed = 1;

    static constexpr std::string_view algorithm = "fnv1a-mix64/v1";

    std::uint64_t stream_seed(std::uint64_t stream) const {
        return mix64(seed + kGolden * (stream + 1));
    }
    std::uint64_t hash(std::string_view s, std::uint64_t stream) const {
        return hash64(s, stream_seed(stream));
    }

    friend bool operator==(const HashFamily&, const HashFamily&) = default;
};

// splitmix64 generator. Used instead of <random> distributions because the
// standard ones are not bit-stable across library implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        state_ += kGolden;
        return mix64(state_);
    }

    // draw in [0, n), n >= 1
    std::uint64_t below(std::uint64_t n) {
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(next()) * n) >> 64);
    }

    // draw in [0, 1) with 53-bit resolution
    double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

private:
    std::uint64_t state_;
};

}  // namespace kbclean
