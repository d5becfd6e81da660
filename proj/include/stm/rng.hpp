#ifndef STM_RNG_HPP
#define STM_RNG_HPP

#include <cstdint>
#include <limits>

namespace stm {

/// xoshiro256++ engine. Cheap to seed, so a fresh engine can be derived for
/// every (update, iteration, voxel) triple.
class Xoshiro256 {
 public:
  using result_type = std::uint64_t;

  explicit Xoshiro256(std::uint64_t seed);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()();

 private:
  std::uint64_t s_[4];
};

std::uint64_t splitmix64(std::uint64_t& state);

enum class Stream : std::uint64_t {
  Nu = 1,
  Beta = 2,
  Tau = 3,
  Lambda = 4,
  Shift = 5,
  Covariates = 16,
  Noise = 17,
  LambdaField = 18,
};

/// Named substreams derived from one root seed. The engine for a given
/// (stream, iteration, index) does not depend on which other engines were
/// drawn, so per-voxel work can run in any order.
class RandomStreams {
 public:
  explicit RandomStreams(std::uint64_t seed) : seed_(seed) {}

  Xoshiro256 engine(Stream stream, std::uint64_t iteration, std::uint64_t index) const;
  std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t seed_;
};

}  // namespace stm

#endif  // STM_RNG_HPP
