#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace qvote {

/// Seeded, splittable pseudo-random generator.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the C++
/// standard. Every derived quantity is computed here from raw 64-bit words
/// rather than through <random> distributions (which are implementation
/// defined), so a seed reproduces bit-identical draws on every toolchain:
///
///   uniform()   = (word >> 11) * 2^-53
///   below(n)    = word mod n, rejecting words >= 2^64 - (2^64 mod n)
///   normal()    = Box-Muller on two uniform() draws
///
/// split(label, index) derives an independent child stream from this
/// generator's *seed* (not its current position) by SplitMix64 finalization
/// of seed, FNV-1a(label) and index. Consumption on the parent never changes
/// what a child produces.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t seed() const { return seed_; }

  std::uint64_t next_u64() { return engine_(); }
  double uniform();
  double uniform(double lo, double hi);
  std::uint64_t below(std::uint64_t n);
  bool bernoulli(double p) { return uniform() < p; }
  double normal();

  Rng split(std::string_view label, std::uint64_t index = 0) const;

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t fnv1a64(std::string_view text);

}  // namespace qvote
