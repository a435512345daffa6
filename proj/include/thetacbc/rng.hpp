#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace thetacbc {

/// Philox4x32-10 counter-based generator.
///
/// The 64-bit key is the master seed; the upper half of the 128-bit counter
/// selects an independent stream and the lower half counts blocks within it.
/// Output depends only on (key, stream, position), never on thread layout.
class Philox4x32 {
public:
    using result_type = std::uint32_t;
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    Philox4x32(std::uint64_t seed, std::uint64_t stream);

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()();

    /// One raw 10-round block, exposed for known-answer tests.
    static Counter block(Counter ctr, Key key);

private:
    Key key_;
    std::uint64_t stream_;
    std::uint64_t block_index_ = 0;
    Counter buffer_{};
    unsigned used_ = 4;
};

/// Per-trajectory random source: uniforms and standard normals drawn from a
/// Philox stream. Normals use Boost's ziggurat so sequences are portable
/// across standard libraries.
class RandomStream {
public:
    RandomStream(std::uint64_t master_seed, std::uint64_t stream_index);

    /// Uniform on the open interval (0, 1).
    double uniform();
    double normal();

    std::uint64_t next_u64();

private:
    Philox4x32 engine_;
};

}  // namespace thetacbc
