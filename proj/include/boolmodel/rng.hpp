#pragma once

// Splittable counter-based random streams.
//
// A stream is identified by a 64-bit key derived from a seed path
// (master seed followed by derivation indices). The n-th draw of a stream is
// a pure function of (key, n), so any replicate or ball can be replayed
// without touching the draws of any other stream.

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

namespace boolmodel {

using SeedPath = std::vector<std::uint64_t>;

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

constexpr std::uint64_t child_key(std::uint64_t parent, std::uint64_t index) noexcept {
    return mix64(parent ^ mix64(index + 0x632be59bd9b4e019ULL));
}

constexpr std::uint64_t derive_key(std::span<const std::uint64_t> path) noexcept {
    std::uint64_t key = 0x243f6a8885a308d3ULL;
    for (auto v : path) key = child_key(key, v);
    return key;
}

inline SeedPath extend_path(SeedPath path, std::uint64_t index) {
    path.push_back(index);
    return path;
}

class Stream {
public:
    using result_type = std::uint64_t;

    explicit constexpr Stream(std::uint64_t key) noexcept : key_(key) {}
    explicit Stream(const SeedPath& path) noexcept : key_(derive_key(path)) {}

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept {
        return std::numeric_limits<result_type>::max();
    }

    constexpr result_type operator()() noexcept {
        ++counter_;
        return mix64(key_ + counter_ * 0x9e3779b97f4a7c15ULL);
    }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() noexcept {
        return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
    }

    /// Uniform on (0, 1].
    double uniform_pos() noexcept {
        return static_cast<double>(((*this)() >> 11) + 1) * 0x1.0p-53;
    }

    /// Independent stream keyed by this stream's key and `index`.
    /// Does not depend on how many draws this stream has made.
    constexpr Stream substream(std::uint64_t index) const noexcept {
        return Stream(child_key(key_, index));
    }

    constexpr std::uint64_t key() const noexcept { return key_; }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

/// Poisson variate; returns 0 for a non-positive mean.
std::int64_t poisson(Stream& s, double mean);

/// Standard normal variate.
double normal(Stream& s);

}  // namespace boolmodel
