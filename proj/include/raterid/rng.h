#pragma once

#include <cstdint>
#include <span>
#include <utility>

namespace raterid {

// splitmix64 finalizer; used to expand user seeds into generator state and to
// derive independent sub-seeds.
std::uint64_t splitmix64(std::uint64_t x);

// Derives the seed of a numbered sub-stream from a parent seed.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

// xorshift64* (Vigna 2016, multiplier 0x2545F4914F6CDD1D, shifts 12/25/27),
// state initialized as splitmix64(seed) (zero state replaced by a constant).
// Every derived variate below is specified exactly so that a fixed seed gives
// the same stream on every platform:
//   uniform()   = (next() >> 11) * 2^-53                      in [0, 1)
//   below(n)    = next() % n after rejecting next() < 2^64 mod n
//   normal()    = sqrt(-2 ln(1 - u1)) * cos(2 pi u2)          Box-Muller
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next();
  double uniform();
  std::uint64_t below(std::uint64_t n);
  double normal();
  bool bernoulli(double p) { return uniform() < p; }

  template <typename T>
  void shuffle(std::span<T> values) {
    for (std::size_t i = values.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(values[i - 1], values[j]);
    }
  }

 private:
  std::uint64_t state_;
};

}  // namespace raterid
