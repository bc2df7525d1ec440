#pragma once

#include <optional>
#include <stdexcept>

#include "coordlab/sequence.hpp"

namespace coordlab {

// Hard cap on codebook size: more than 2^24 codewords fails fast.
inline constexpr size_t kMaxCodebookBits = 24;
// Codebooks whose total symbol count stays under this are materialized;
// larger ones regenerate codewords from the PRF on the fly.
inline constexpr size_t kMaterializeSymbolCap = size_t{1} << 25;

struct CodebookLimitError : std::runtime_error {
  size_t requested_bits;
  CodebookLimitError(std::string what, size_t bits)
      : std::runtime_error(std::move(what)), requested_bits(bits) {}
};

struct RateError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Typicality threshold as a function of block length: either a fixed value
// or the shrinking schedule clamp(c * n^{-1/3}, lo, hi).
struct EpsilonPolicy {
  enum class Kind { schedule, fixed };
  Kind kind = Kind::schedule;
  double fixed_value = 0.1;
  double coefficient = 2.0;
  double clamp_lo = 0.02;
  double clamp_hi = 0.3;

  double value(size_t n) const;
  static EpsilonPolicy fixed(double v);
  static EpsilonPolicy schedule();
};

// 2^bits codewords of length n drawn i.i.d. from `law`, realized through a
// counter-based PRF keyed by (seed, codeword, position). The draw is
// independent of scan order and thread count; small books are materialized
// for fast scanning.
class IidCodebook {
 public:
  IidCodebook() = default;
  IidCodebook(Pmf law, size_t n, size_t bits, uint64_t seed);

  size_t bits() const { return bits_; }
  size_t count() const { return size_t{1} << bits_; }
  size_t block_length() const { return n_; }
  const Pmf& law() const { return law_; }

  // pointer to codeword i when materialized, nullptr otherwise
  const uint8_t* materialized_codeword(size_t i) const;
  void generate_codeword(size_t i, std::span<uint8_t> out) const;
  SequenceBlock codeword_block(size_t i) const;

 private:
  uint8_t symbol_at(size_t i, size_t j) const;

  Pmf law_;
  size_t n_ = 0;
  size_t bits_ = 0;
  uint64_t seed_ = 0;
  std::vector<double> cdf_;
  std::vector<uint8_t> table_;
  bool materialized_ = false;
};

// Outcome of one simulated transmission round.
struct TrialResult {
  bool encode_ok = false;
  bool decode_ok = false;
  bool decoded_index_correct = false;
  double tv_distance = 1.0;
  size_t n = 0;
  uint64_t seed = 0;
  std::string error;  // nonempty when the trial aborted
};

enum class DecodeStatus { ok, none_typical, ambiguous };
std::string_view decode_status_name(DecodeStatus s);

// Bijective scan order over [0, 2^bits): t -> (mul * t + add) mod 2^bits
// with mul odd. Derived from an Rng per encoding attempt so codeword 0
// carries no special weight in the statistics.
class ScanOrder {
 public:
  ScanOrder(size_t bits, Rng& rng);
  size_t at(size_t t) const { return (mul_ * t + add_) & mask_; }

 private:
  size_t mask_;
  size_t mul_;
  size_t add_;
};

}  // namespace coordlab
