#include "coordlab/symbol_map.hpp"

#include <stdexcept>

namespace coordlab {

SymbolMap::SymbolMap(std::vector<Alphabet> from, Alphabet to, std::vector<size_t> table)
    : from_(std::move(from)), to_(std::move(to)) {
  std::vector<size_t> sizes;
  sizes.reserve(from_.size());
  for (const auto& a : from_) sizes.push_back(a.size());
  ix_ = ProductIndexer(std::move(sizes));
  if (table.size() != ix_.total())
    throw std::invalid_argument("SymbolMap: table size " + std::to_string(table.size()) +
                                " != input space size " + std::to_string(ix_.total()));
  for (size_t v : table)
    if (v >= to_.size()) throw std::out_of_range("SymbolMap: output index out of range");
  table_ = std::move(table);
}

ConditionalPmf SymbolMap::as_conditional() const {
  std::vector<std::vector<double>> rows(ix_.total(), std::vector<double>(to_.size(), 0.0));
  for (size_t r = 0; r < ix_.total(); ++r) rows[r][table_[r]] = 1.0;
  return ConditionalPmf(from_, to_, std::move(rows));
}

SymbolMap SymbolMap::project(std::vector<Alphabet> from, Alphabet to, size_t input_position) {
  if (input_position >= from.size())
    throw std::out_of_range("SymbolMap::project: input position out of range");
  if (!from[input_position].same_symbols(to))
    throw std::invalid_argument("SymbolMap::project: projected alphabet must share symbols");
  std::vector<size_t> sizes;
  for (const auto& a : from) sizes.push_back(a.size());
  ProductIndexer ix(sizes);
  std::vector<size_t> table(ix.total());
  std::vector<size_t> tuple(from.size());
  for (size_t flat = 0; flat < ix.total(); ++flat) {
    ix.unflat(flat, tuple);
    table[flat] = tuple[input_position];
  }
  return SymbolMap(std::move(from), std::move(to), std::move(table));
}

}  // namespace coordlab
