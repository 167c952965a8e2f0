#ifndef HISTMATCH_RNG_HPP
#define HISTMATCH_RNG_HPP

#include <cstdint>
#include <string_view>

namespace histmatch {

namespace detail {

// splitmix64 finalizer (Vigna / Stafford mix13).
inline std::uint64_t mix64(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xbf58476d1ce4e5b9ULL;
    z ^= z >> 27;
    z *= 0x94d049bb133111ebULL;
    z ^= z >> 31;
    return z;
}

inline std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

} // namespace detail

/// Counter-based deterministic random stream. Draw i is a pure function of
/// (key, i), so the sequence is independent of thread scheduling and
/// identical across platforms. Construct via derive_stream.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t key) : key_(key) {}

    std::uint64_t next_u64() {
        return detail::mix64(key_ + (++counter_) * 0x9e3779b97f4a7c15ULL);
    }

    /// Uniform double in [0, 1), 53 bits of precision.
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Uniform integer in [0, n). Consumes exactly one draw
    /// (fixed-point multiply, no rejection loop).
    std::uint64_t next_below(std::uint64_t n) {
        const unsigned __int128 wide =
            static_cast<unsigned __int128>(next_u64()) * static_cast<unsigned __int128>(n);
        return static_cast<std::uint64_t>(wide >> 64);
    }

    /// Number of draws consumed so far.
    std::uint64_t draws() const { return counter_; }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

/// Derive an independent stream from a run seed and a stable item
/// identifier. Identical (seed, id) pairs always produce the same stream;
/// distinct ids decorrelate via the string hash. Callers namespace ids per
/// purpose (e.g. "augment/<path>", "split/<stratum>") so different uses of
/// one seed do not share sequences.
inline RandomStream derive_stream(std::uint64_t seed, std::string_view id) {
    std::uint64_t key = detail::mix64(seed ^ 0x5851f42d4c957f2dULL);
    key = detail::mix64(key ^ detail::fnv1a64(id));
    return RandomStream(key);
}

} // namespace histmatch

#endif // HISTMATCH_RNG_HPP
