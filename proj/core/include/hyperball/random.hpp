#pragma once

#include <array>
#include <cstdint>

namespace hyperball {

/// Philox4x32-10 counter-based generator (Salmon et al., Random123).
///
/// A generator is identified by (seed, stream): the seed is the 64-bit key,
/// the stream occupies the upper 64 bits of the 128-bit counter and the lower
/// 64 bits count blocks. Distinct streams never overlap, so any number of
/// independent, reproducible generators can be derived from one user seed
/// without shared state.
///
/// Variates are produced by fixed, documented transforms (53-bit uniforms,
/// Box-Muller normals, inversion exponentials) rather than std::
/// distributions, whose output is implementation-defined.
class Rng {
 public:
  using Block = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0) noexcept;

  /// Raw Philox4x32-10 bijection.
  static Block philox(Block counter, Key key) noexcept;

  std::uint32_t next_u32() noexcept;
  std::uint64_t next_u64() noexcept;

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept;
  /// Standard normal via Box-Muller; the sine branch is discarded so each
  /// call consumes exactly two uniforms.
  double normal() noexcept;
  /// Exponential with unit mean.
  double exponential() noexcept;
  /// Uniform integer in [0, bound).
  std::uint64_t below(std::uint64_t bound) noexcept;

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream() const noexcept { return stream_; }

 private:
  void refill() noexcept;

  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t block_index_ = 0;
  Block buffer_{};
  int used_ = 4;
};

/// Derives a child seed from (seed, tag) by one Philox evaluation on a
/// counter reserved for seed splitting (stream = 2^64 - 1). Used for
/// restart sub-streams: child = derive_seed(user_seed, restart_index).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag) noexcept;

}  // namespace hyperball
