#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <span>

namespace vacant {

/// Philox4x32-10 block function (Salmon et al., SC'11).
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

/// Stream identifiers, so that independent consumers keyed by the same seed
/// never share random blocks.
enum class Stream : std::uint64_t {
    Path = 0,
    Start = 1,
    Probes = 2,
    Walkers = 3,
    Fixture = 4,
    Sampling = 5,
};

/// Counter-based generator keyed by (seed, stream). The block counter can be
/// repositioned at will, which gives random access into the sequence.
class CounterRng {
  public:
    using result_type = std::uint64_t;

    CounterRng(std::uint64_t seed, std::uint64_t stream, std::uint64_t block = 0);
    CounterRng(std::uint64_t seed, Stream stream, std::uint64_t block = 0)
        : CounterRng(seed, static_cast<std::uint64_t>(stream), block) {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()();

    /// Uniform on the open interval (0, 1).
    double uniform();
    /// Standard normal via Box-Muller.
    double normal();
    void fill_normal(std::span<double> out);

    /// Jump to the start of block `block`; clears any buffered output.
    void seek(std::uint64_t block);
    std::uint64_t block() const { return block_; }

  private:
    void refill();

    std::array<std::uint32_t, 2> key_;
    std::uint64_t stream_;
    std::uint64_t block_ = 0;
    std::array<std::uint64_t, 2> buffer_{};
    int buffered_ = 0;
    double spare_normal_ = 0.0;
    bool has_spare_ = false;
};

/// SplitMix64 mixing; used to derive per-replica seeds from a base seed.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt);

}  // namespace vacant
