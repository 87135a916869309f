#pragma once

// Hierarchical, splittable random streams.
//
// A stream is identified by (master seed, path). The key of a child stream is
//   key(child) = mix64(key(parent) ^ mix64(index + 0x632be59bd9b4e019))
// with key(root) = mix64(master). mix64 is the SplitMix64 finalizer. The key
// seeds a xoshiro256** generator through four SplitMix64 steps. Identical
// (seed, path) always yields the identical sequence, independent of which
// thread consumes it.

#include <array>
#include <cstdint>
#include <initializer_list>
#include <vector>

namespace bandspectra {

std::uint64_t mix64(std::uint64_t z) noexcept;

class RandomStream {
 public:
  explicit RandomStream(std::uint64_t master_seed);

  std::uint64_t master_seed() const noexcept { return master_; }
  const std::vector<std::uint64_t>& path() const noexcept { return path_; }
  std::uint64_t key() const noexcept { return key_; }

  /// Fresh stream one level deeper; does not consume from this stream.
  RandomStream substream(std::uint64_t index) const;
  RandomStream substream(std::initializer_list<std::uint64_t> indices) const;

  std::uint64_t next_u64() noexcept;
  /// Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept;
  /// Uniform on (0, 1].
  double uniform_open_zero() noexcept { return 1.0 - uniform(); }
  /// Standard normal via the Marsaglia polar method; the second variate of
  /// each accepted pair is cached and returned by the next call.
  double normal() noexcept;
  /// +1 or -1 from one random bit; 64 calls consume one 64-bit draw.
  double rademacher() noexcept;

 private:
  RandomStream(std::uint64_t master, std::vector<std::uint64_t> path, std::uint64_t key);
  void seed_state() noexcept;

  std::uint64_t master_;
  std::vector<std::uint64_t> path_;
  std::uint64_t key_;
  std::array<std::uint64_t, 4> s_{};
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
  std::uint64_t sign_bits_ = 0;
  int sign_bits_left_ = 0;
};

}  // namespace bandspectra
