#pragma once

#include <cstdint>
#include <string_view>

namespace explab {

/// SplitMix64 finalizer. Bijective on 64-bit words.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Order-dependent combination of two words into one.
std::uint64_t combine64(std::uint64_t a, std::uint64_t b) noexcept;

/// FNV-1a over bytes; stable across platforms, used for seeding from identifiers.
std::uint64_t fnv1a64(std::string_view bytes) noexcept;

/// Counter-based 64-bit generator.
///
/// Output i is mix(key, i), so the full state is (key, counter) and streams can be
/// serialized, forked and replayed exactly. Distributions are implemented here
/// rather than through <random> so sequences are identical on every standard library.
class Rng {
public:
    Rng() = default;
    explicit Rng(std::uint64_t seed, std::uint64_t stream = 0) noexcept;

    std::uint64_t next_u64() noexcept;
    /// Uniform in [0, 1) with 53 bits of precision.
    double uniform() noexcept;
    /// Uniform integer in [0, n). n must be > 0.
    std::uint64_t below(std::uint64_t n) noexcept;
    /// Uniform integer in [lo, hi). Requires lo < hi.
    std::int64_t range(std::int64_t lo, std::int64_t hi) noexcept;
    bool coin() noexcept;
    /// Standard normal via Box-Muller (consumes two outputs).
    double normal() noexcept;

    std::uint64_t key() const noexcept { return key_; }
    std::uint64_t counter() const noexcept { return counter_; }
    static Rng from_state(std::uint64_t key, std::uint64_t counter) noexcept;

    friend bool operator==(const Rng&, const Rng&) = default;

private:
    std::uint64_t key_ = 0;
    std::uint64_t counter_ = 0;
};

}  // namespace explab
