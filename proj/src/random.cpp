#include "bandspectra/random.hpp"

#include <cmath>

namespace bandspectra {

std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

namespace {

constexpr std::uint64_t kChildSalt = 0x632be59bd9b4e019ULL;

inline std::uint64_t rotl(std::uint64_t x, int k) noexcept { return (x << k) | (x >> (64 - k)); }

}  // namespace

RandomStream::RandomStream(std::uint64_t master_seed) : master_(master_seed), key_(mix64(master_seed)) {
  seed_state();
}

RandomStream::RandomStream(std::uint64_t master, std::vector<std::uint64_t> path, std::uint64_t key)
    : master_(master), path_(std::move(path)), key_(key) {
  seed_state();
}

void RandomStream::seed_state() noexcept {
  std::uint64_t x = key_;
  for (auto& word : s_) {
    x += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    word = z ^ (z >> 31);
  }
}

RandomStream RandomStream::substream(std::uint64_t index) const {
  auto path = path_;
  path.push_back(index);
  return RandomStream(master_, std::move(path), mix64(key_ ^ mix64(index + kChildSalt)));
}

RandomStream RandomStream::substream(std::initializer_list<std::uint64_t> indices) const {
  RandomStream out = *this;
  for (auto i : indices) out = out.substream(i);
  return out;
}

std::uint64_t RandomStream::next_u64() noexcept {
  // xoshiro256**
  const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

double RandomStream::uniform() noexcept { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

double RandomStream::normal() noexcept {
  if (has_spare_) {
    has_spare_ = false;
    return spare_normal_;
  }
  double u, v, s;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double factor = std::sqrt(-2.0 * std::log(s) / s);
  spare_normal_ = v * factor;
  has_spare_ = true;
  return u * factor;
}

double RandomStream::rademacher() noexcept {
  if (sign_bits_left_ == 0) {
    sign_bits_ = next_u64();
    sign_bits_left_ = 64;
  }
  const double out = (sign_bits_ & 1ULL) ? 1.0 : -1.0;
  sign_bits_ >>= 1;
  --sign_bits_left_;
  return out;
}

}  // namespace bandspectra
