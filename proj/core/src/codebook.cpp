#include "coordlab/codebook.hpp"

#include <algorithm>
#include <cmath>

namespace coordlab {

double EpsilonPolicy::value(size_t n) const {
  if (kind == Kind::fixed) return fixed_value;
  const double raw = coefficient * std::pow(static_cast<double>(n), -1.0 / 3.0);
  return std::clamp(raw, clamp_lo, clamp_hi);
}

EpsilonPolicy EpsilonPolicy::fixed(double v) {
  EpsilonPolicy p;
  p.kind = Kind::fixed;
  p.fixed_value = v;
  return p;
}

EpsilonPolicy EpsilonPolicy::schedule() { return EpsilonPolicy{}; }

IidCodebook::IidCodebook(Pmf law, size_t n, size_t bits, uint64_t seed)
    : law_(std::move(law)), n_(n), bits_(bits), seed_(seed) {
  if (n_ < 1) throw std::invalid_argument("IidCodebook: block length must be >= 1");
  if (bits_ > kMaxCodebookBits)
    throw CodebookLimitError("codebook of 2^" + std::to_string(bits_) +
                                 " codewords exceeds the 2^" +
                                 std::to_string(kMaxCodebookBits) + " limit",
                             bits_);
  cdf_.resize(law_.size());
  double acc = 0.0;
  for (size_t i = 0; i < law_.size(); ++i) {
    acc += law_[i];
    cdf_[i] = acc;
  }
  cdf_.back() = 1.0;

  if (count() <= kMaterializeSymbolCap / n_) {
    table_.resize(count() * n_);
    for (size_t i = 0; i < count(); ++i)
      for (size_t j = 0; j < n_; ++j) table_[i * n_ + j] = symbol_at(i, j);
    materialized_ = true;
  }
}

uint8_t IidCodebook::symbol_at(size_t i, size_t j) const {
  const uint64_t word = splitmix64(splitmix64(seed_ ^ splitmix64(i)) ^ (j + 1));
  const double u = static_cast<double>(word >> 11) * 0x1.0p-53;
  for (size_t k = 0; k + 1 < cdf_.size(); ++k)
    if (u < cdf_[k]) return static_cast<uint8_t>(k);
  return static_cast<uint8_t>(cdf_.size() - 1);
}

const uint8_t* IidCodebook::materialized_codeword(size_t i) const {
  return materialized_ ? table_.data() + i * n_ : nullptr;
}

void IidCodebook::generate_codeword(size_t i, std::span<uint8_t> out) const {
  if (materialized_) {
    std::copy_n(table_.data() + i * n_, n_, out.data());
    return;
  }
  for (size_t j = 0; j < n_; ++j) out[j] = symbol_at(i, j);
}

SequenceBlock IidCodebook::codeword_block(size_t i) const {
  SequenceBlock b{law_.alphabet(), std::vector<uint8_t>(n_)};
  generate_codeword(i, b.symbols);
  return b;
}

std::string_view decode_status_name(DecodeStatus s) {
  switch (s) {
    case DecodeStatus::ok: return "ok";
    case DecodeStatus::none_typical: return "none_typical";
    case DecodeStatus::ambiguous: return "ambiguous";
  }
  return "?";
}

ScanOrder::ScanOrder(size_t bits, Rng& rng) {
  mask_ = (size_t{1} << bits) - 1;
  mul_ = (rng.next_u64() | 1) & mask_;
  if (mul_ == 0) mul_ = 1;
  add_ = rng.next_u64() & mask_;
}

}  // namespace coordlab
