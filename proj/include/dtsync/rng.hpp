#pragma once

#include <cmath>
#include <cstdint>

namespace dtsync::rng {

/// Finalizer of the splitmix64 generator. Bijective on 64-bit words with
/// strong avalanche, which is what makes counter-based draws usable as
/// independent variates.
inline constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Derives an independent stream seed from (seed, stream id). Used to give
/// every purpose (server layout, fading, mobility, ...) its own stream so
/// consumption order in one stream never shifts another.
inline constexpr std::uint64_t derive(std::uint64_t seed, std::uint64_t stream) noexcept {
    return mix64(seed ^ mix64(stream));
}

/// Counter-based draw: the n-th variate of a stream is addressable directly,
/// so lazily generated values are bit-identical to bulk generation.
inline constexpr std::uint64_t at(std::uint64_t stream_seed, std::uint64_t counter) noexcept {
    return mix64(stream_seed ^ mix64(counter + 0x632be59bd9b4e019ULL));
}

inline constexpr std::uint64_t at2(std::uint64_t stream_seed, std::uint64_t i, std::uint64_t j) noexcept {
    return at(at(stream_seed, i), j);
}

inline constexpr std::uint64_t at3(std::uint64_t stream_seed, std::uint64_t i, std::uint64_t j,
                                   std::uint64_t k) noexcept {
    return at(at(at(stream_seed, i), j), k);
}

/// Maps a 64-bit word to (0,1), strictly excluding both endpoints.
inline double to_unit_open(std::uint64_t x) noexcept {
    // 52 mantissa bits so both endpoints stay representable and strictly inside (0, 1);
    // a 53-bit offset would round (2^53 - 0.5) up and return exactly 1.0 for ~0ULL.
    return (static_cast<double>(x >> 12) + 0.5) * 0x1.0p-52;
}

inline double to_uniform(std::uint64_t x, double lo, double hi) noexcept {
    return lo + (hi - lo) * (static_cast<double>(x >> 11) * 0x1.0p-53);
}

/// Unit-mean exponential variate; strictly positive.
inline double to_exponential(std::uint64_t x) noexcept {
    return -std::log(to_unit_open(x));
}

/// Unbiased-enough integer in [0, n) via multiply-shift.
inline std::uint64_t to_index(std::uint64_t x, std::uint64_t n) noexcept {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(x) * static_cast<unsigned __int128>(n)) >> 64);
}

/// Sequential stream for consumers that do not need addressability.
class Stream {
public:
    explicit Stream(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() noexcept {
        state_ += 0x9e3779b97f4a7c15ULL;
        std::uint64_t x = state_;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
        return x ^ (x >> 31);
    }

    double unit_open() noexcept { return to_unit_open(next()); }
    double uniform(double lo, double hi) noexcept { return to_uniform(next(), lo, hi); }
    double exponential() noexcept { return to_exponential(next()); }
    std::uint64_t index(std::uint64_t n) noexcept { return to_index(next(), n); }

private:
    std::uint64_t state_;
};

}  // namespace dtsync::rng
