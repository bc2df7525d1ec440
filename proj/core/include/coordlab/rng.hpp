#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace coordlab {

// Stable 64-bit mixing used for seed derivation everywhere results must
// replicate across runs, platforms, and thread counts. The scheme is
// FNV-1a over length-prefixed parts followed by a splitmix64 finalizer:
//   FNV offset basis 14695981039346656037, FNV prime 1099511628211,
//   splitmix64 increment 0x9e3779b97f4a7c15.
uint64_t splitmix64(uint64_t x);

class HashStream {
 public:
  HashStream& add(uint64_t v);
  HashStream& add(std::string_view s);
  uint64_t digest() const;

 private:
  uint64_t h_ = 14695981039346656037ull;
};

uint64_t stable_hash(uint64_t seed, std::string_view tag);
uint64_t stable_hash(uint64_t seed, std::string_view tag, uint64_t a);
uint64_t stable_hash(uint64_t seed, std::string_view tag, uint64_t a, uint64_t b);

// xoshiro256** seeded through splitmix64. All stochastic operations take an
// explicit Rng so experiments replay exactly. `derive` creates an
// independent child stream from the original seed and a label; deriving does
// not consume state, so parallel workers can be handed streams in any order.
class Rng {
 public:
  explicit Rng(uint64_t seed);

  uint64_t next_u64();
  // 53-bit uniform in [0,1)
  double next_unit();
  // uniform in [0, bound), bound >= 1
  uint64_t next_below(uint64_t bound);

  Rng derive(std::string_view label) const;
  Rng derive(std::string_view label, uint64_t index) const;

  uint64_t seed() const { return seed_; }

 private:
  uint64_t seed_;
  uint64_t s_[4];
};

}  // namespace coordlab
