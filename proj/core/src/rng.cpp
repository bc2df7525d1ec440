#include "coordlab/rng.hpp"

#include <stdexcept>

namespace coordlab {

uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

namespace {
constexpr uint64_t kFnvPrime = 1099511628211ull;

uint64_t fnv_byte(uint64_t h, uint8_t b) { return (h ^ b) * kFnvPrime; }

uint64_t fnv_u64(uint64_t h, uint64_t v) {
  for (int i = 0; i < 8; ++i) h = fnv_byte(h, static_cast<uint8_t>(v >> (8 * i)));
  return h;
}
}  // namespace

HashStream& HashStream::add(uint64_t v) {
  h_ = fnv_u64(h_, v);
  return *this;
}

HashStream& HashStream::add(std::string_view s) {
  h_ = fnv_u64(h_, s.size());
  for (char c : s) h_ = fnv_byte(h_, static_cast<uint8_t>(c));
  return *this;
}

uint64_t HashStream::digest() const { return splitmix64(h_); }

uint64_t stable_hash(uint64_t seed, std::string_view tag) {
  return HashStream().add(seed).add(tag).digest();
}
uint64_t stable_hash(uint64_t seed, std::string_view tag, uint64_t a) {
  return HashStream().add(seed).add(tag).add(a).digest();
}
uint64_t stable_hash(uint64_t seed, std::string_view tag, uint64_t a, uint64_t b) {
  return HashStream().add(seed).add(tag).add(a).add(b).digest();
}

Rng::Rng(uint64_t seed) : seed_(seed) {
  uint64_t x = seed;
  for (auto& s : s_) {
    x = splitmix64(x);
    s = x;
  }
}

static inline uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

uint64_t Rng::next_u64() {
  const uint64_t result = rotl(s_[1] * 5, 7) * 9;
  const uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

double Rng::next_unit() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

uint64_t Rng::next_below(uint64_t bound) {
  if (bound == 0) throw std::invalid_argument("Rng::next_below: bound must be >= 1");
  // rejection sampling keeps the draw unbiased and platform-stable
  const uint64_t limit = bound * (UINT64_MAX / bound);
  uint64_t v;
  do {
    v = next_u64();
  } while (v >= limit);
  return v % bound;
}

Rng Rng::derive(std::string_view label) const {
  return Rng(stable_hash(seed_, label));
}

Rng Rng::derive(std::string_view label, uint64_t index) const {
  return Rng(stable_hash(seed_, label, index));
}

}  // namespace coordlab
