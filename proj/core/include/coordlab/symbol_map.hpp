#pragma once

#include <span>
#include <vector>

#include "coordlab/pmf.hpp"

namespace coordlab {

// Total deterministic map from a product of alphabets to an output alphabet,
// e.g. the symbol-by-symbol encoder x(s,u) or reconstruction shat(u,y).
// The table holds one output index per input tuple, in C order.
class SymbolMap {
 public:
  SymbolMap() = default;
  SymbolMap(std::vector<Alphabet> from, Alphabet to, std::vector<size_t> table);

  const std::vector<Alphabet>& from() const { return from_; }
  const Alphabet& to() const { return to_; }
  const ProductIndexer& indexer() const { return ix_; }
  const std::vector<size_t>& table() const { return table_; }

  size_t apply(std::span<const size_t> inputs) const { return table_[ix_.flat(inputs)]; }
  size_t apply_flat(size_t flat_input) const { return table_[flat_input]; }

  // deterministic conditional: P(out | inputs) = 1 at the mapped symbol
  ConditionalPmf as_conditional() const;

  static SymbolMap project(std::vector<Alphabet> from, Alphabet to, size_t input_position);

 private:
  std::vector<Alphabet> from_;
  Alphabet to_;
  ProductIndexer ix_;
  std::vector<size_t> table_;
};

}  // namespace coordlab
