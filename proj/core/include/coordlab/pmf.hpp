#pragma once

#include <span>
#include <vector>

#include "coordlab/alphabet.hpp"
#include "coordlab/indexing.hpp"

namespace coordlab {

// Normalization tolerance for all probability vectors: weights that sum to 1
// within this are renormalized on construction, anything further off is
// rejected.
inline constexpr double kPmfSumTolerance = 1e-12;

class Pmf {
 public:
  Pmf() = default;
  Pmf(Alphabet alphabet, std::vector<double> mass);

  const Alphabet& alphabet() const { return alphabet_; }
  const std::vector<double>& mass() const { return mass_; }
  double operator[](size_t i) const { return mass_[i]; }
  size_t size() const { return mass_.size(); }

  double mass_of(const std::string& symbol) const { return mass_[alphabet_.index_of(symbol)]; }

  bool operator==(const Pmf& other) const
  { return alphabet_ == other.alphabet_ && mass_ == other.mass_; }

  static Pmf uniform(Alphabet alphabet);
  static Pmf point_mass(Alphabet alphabet, size_t symbol_index);
  // two-symbol alphabet with P(second symbol) = p
  static Pmf bernoulli(Alphabet alphabet, double p);

 private:
  Alphabet alphabet_;
  std::vector<double> mass_;
};

// One Pmf row per conditioning tuple; rows are laid out in the C order of
// the `from` product space. A flagged row marks a conditioning event of zero
// probability: the stored row is a uniform placeholder and consumers that
// compare conditionals should skip it.
class ConditionalPmf {
 public:
  ConditionalPmf() = default;
  ConditionalPmf(std::vector<Alphabet> from, Alphabet to, std::vector<std::vector<double>> rows);

  const std::vector<Alphabet>& from() const { return from_; }
  const Alphabet& to() const { return to_; }
  const ProductIndexer& row_indexer() const { return rows_ix_; }
  size_t row_count() const { return rows_ix_.total(); }

  std::span<const double> row(size_t row_index) const;
  std::span<const double> row(std::span<const size_t> given) const;
  double prob(std::span<const size_t> given, size_t out_index) const;

  bool row_flagged(size_t row_index) const { return flagged_[row_index] != 0; }
  bool any_flagged() const;
  void flag_row(size_t row_index) { flagged_[row_index] = 1; }

  // identity map between equal-symbol alphabets
  static ConditionalPmf identity(Alphabet from, Alphabet to);
  // binary symmetric channel: flips with probability eps
  static ConditionalPmf bsc(Alphabet from, Alphabet to, double eps);

 private:
  std::vector<Alphabet> from_;
  Alphabet to_;
  ProductIndexer rows_ix_;
  std::vector<double> table_;   // row_count x to.size()
  std::vector<uint8_t> flagged_;
};

}  // namespace coordlab
