#pragma once

#include <cstdint>

namespace tailgini {

// Seeded random stream built on the pcg64 generator (128-bit LCG state,
// XSL-RR output). A stream is addressed by (seed, stream index): the same
// pair always reproduces the same sequence, and distinct stream indices
// select distinct LCG increments, so replications can each own a stream
// without coordinating.
class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t stream_index = 0);

    std::uint64_t seed() const noexcept { return seed_; }
    std::uint64_t stream_index() const noexcept { return stream_index_; }

    std::uint64_t next_u64();

    // Uniform on the open interval (0,1); never returns 0 or 1.
    double next_uniform();

    // Standard normal variate via the inverse-CDF transform, so the
    // draw consumes exactly one uniform and is reproducible.
    double next_normal();

    // Uniform integer in [0, bound) without modulo bias.
    std::uint64_t next_below(std::uint64_t bound);

private:
    unsigned __int128 state_;
    unsigned __int128 inc_;
    std::uint64_t seed_;
    std::uint64_t stream_index_;
};

} // namespace tailgini
