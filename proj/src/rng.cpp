#include "tailgini/rng.hpp"

#include "tailgini/normal.hpp"

namespace tailgini {

namespace {

using u128 = unsigned __int128;

constexpr u128 kMultiplier =
    (u128(0x2360ed051fc65da4ULL) << 64) | u128(0x4385df649fccf645ULL);

inline std::uint64_t rotr64(std::uint64_t v, unsigned rot) {
    return (v >> rot) | (v << ((-rot) & 63u));
}

} // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_index)
    : state_(0), seed_(seed), stream_index_(stream_index) {
    inc_ = (u128(stream_index) << 1) | 1u;
    state_ = state_ * kMultiplier + inc_;
    state_ += u128(seed);
    state_ = state_ * kMultiplier + inc_;
}

std::uint64_t RngStream::next_u64() {
    state_ = state_ * kMultiplier + inc_;
    const unsigned rot = static_cast<unsigned>(state_ >> 122);
    const std::uint64_t xored =
        static_cast<std::uint64_t>(state_ >> 64) ^ static_cast<std::uint64_t>(state_);
    return rotr64(xored, rot);
}

double RngStream::next_uniform() {
    // 53 random bits centered in each cell keep the value strictly inside (0,1).
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double RngStream::next_normal() {
    return normal_quantile(next_uniform());
}

std::uint64_t RngStream::next_below(std::uint64_t bound) {
    const std::uint64_t threshold = (-bound) % bound;
    for (;;) {
        const std::uint64_t v = next_u64();
        if (v >= threshold) return v % bound;
    }
}

} // namespace tailgini
