#include "stm/rng.hpp"

namespace stm {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

namespace {
inline std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
}  // namespace

Xoshiro256::Xoshiro256(std::uint64_t seed) {
  for (auto& word : s_) word = splitmix64(seed);
}

Xoshiro256::result_type Xoshiro256::operator()() {
  const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

Xoshiro256 RandomStreams::engine(Stream stream, std::uint64_t iteration, std::uint64_t index) const {
  std::uint64_t state = seed_;
  std::uint64_t key = splitmix64(state);
  state = key ^ static_cast<std::uint64_t>(stream);
  key = splitmix64(state);
  state = key ^ iteration;
  key = splitmix64(state);
  state = key ^ index;
  return Xoshiro256(splitmix64(state));
}

}  // namespace stm
