#include "coordlab/pmf.hpp"

#include <cmath>
#include <stdexcept>

namespace coordlab {

ProductIndexer::ProductIndexer(std::vector<size_t> sizes) : sizes_(std::move(sizes)) {
  strides_.resize(sizes_.size());
  total_ = 1;
  for (size_t i = sizes_.size(); i-- > 0;) {
    if (sizes_[i] == 0) throw std::invalid_argument("ProductIndexer: zero-sized axis");
    strides_[i] = total_;
    total_ *= sizes_[i];
  }
}

size_t ProductIndexer::flat(std::span<const size_t> tuple) const {
  if (tuple.size() != sizes_.size())
    throw std::invalid_argument("ProductIndexer: tuple rank mismatch");
  size_t idx = 0;
  for (size_t i = 0; i < tuple.size(); ++i) {
    if (tuple[i] >= sizes_[i]) throw std::out_of_range("ProductIndexer: coordinate out of range");
    idx += tuple[i] * strides_[i];
  }
  return idx;
}

void ProductIndexer::unflat(size_t index, std::span<size_t> out) const {
  for (size_t i = 0; i < sizes_.size(); ++i) {
    out[i] = index / strides_[i];
    index %= strides_[i];
  }
}

std::vector<size_t> ProductIndexer::tuple_of(size_t index) const {
  std::vector<size_t> t(sizes_.size());
  unflat(index, t);
  return t;
}

namespace {
std::vector<double> normalized_or_throw(std::vector<double> w, const std::string& what) {
  double sum = 0.0;
  for (double v : w) {
    if (!(v >= 0.0) || !std::isfinite(v))
      throw std::invalid_argument(what + ": weights must be finite and nonnegative");
    sum += v;
  }
  if (std::abs(sum - 1.0) > kPmfSumTolerance)
    throw std::invalid_argument(what + ": weights sum to " + std::to_string(sum) +
                                ", outside the normalization tolerance");
  for (double& v : w) v /= sum;
  return w;
}
}  // namespace

Pmf::Pmf(Alphabet alphabet, std::vector<double> mass) : alphabet_(std::move(alphabet)) {
  if (mass.size() != alphabet_.size())
    throw std::invalid_argument("Pmf '" + alphabet_.name() + "': mass size != alphabet size");
  mass_ = normalized_or_throw(std::move(mass), "Pmf '" + alphabet_.name() + "'");
}

Pmf Pmf::uniform(Alphabet alphabet) {
  std::vector<double> m(alphabet.size(), 1.0 / static_cast<double>(alphabet.size()));
  return Pmf(std::move(alphabet), std::move(m));
}

Pmf Pmf::point_mass(Alphabet alphabet, size_t symbol_index) {
  if (symbol_index >= alphabet.size()) throw std::out_of_range("Pmf::point_mass: index out of range");
  std::vector<double> m(alphabet.size(), 0.0);
  m[symbol_index] = 1.0;
  return Pmf(std::move(alphabet), std::move(m));
}

Pmf Pmf::bernoulli(Alphabet alphabet, double p) {
  if (alphabet.size() != 2) throw std::invalid_argument("Pmf::bernoulli: alphabet must be binary");
  if (p < 0.0 || p > 1.0) throw std::invalid_argument("Pmf::bernoulli: p outside [0,1]");
  return Pmf(std::move(alphabet), {1.0 - p, p});
}

ConditionalPmf::ConditionalPmf(std::vector<Alphabet> from, Alphabet to,
                               std::vector<std::vector<double>> rows)
    : from_(std::move(from)), to_(std::move(to)) {
  std::vector<size_t> sizes;
  sizes.reserve(from_.size());
  for (const auto& a : from_) sizes.push_back(a.size());
  rows_ix_ = ProductIndexer(std::move(sizes));
  if (rows.size() != rows_ix_.total())
    throw std::invalid_argument("ConditionalPmf '" + to_.name() + "': expected " +
                                std::to_string(rows_ix_.total()) + " rows, got " +
                                std::to_string(rows.size()));
  table_.reserve(rows_ix_.total() * to_.size());
  for (size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != to_.size())
      throw std::invalid_argument("ConditionalPmf '" + to_.name() + "': row size mismatch");
    auto nr = normalized_or_throw(std::move(rows[r]),
                                  "ConditionalPmf '" + to_.name() + "' row " + std::to_string(r));
    table_.insert(table_.end(), nr.begin(), nr.end());
  }
  flagged_.assign(rows_ix_.total(), 0);
}

std::span<const double> ConditionalPmf::row(size_t row_index) const {
  return {table_.data() + row_index * to_.size(), to_.size()};
}

std::span<const double> ConditionalPmf::row(std::span<const size_t> given) const {
  return row(rows_ix_.flat(given));
}

double ConditionalPmf::prob(std::span<const size_t> given, size_t out_index) const {
  return row(given)[out_index];
}

bool ConditionalPmf::any_flagged() const {
  for (uint8_t f : flagged_)
    if (f) return true;
  return false;
}

ConditionalPmf ConditionalPmf::identity(Alphabet from, Alphabet to) {
  if (!from.same_symbols(to))
    throw std::invalid_argument("ConditionalPmf::identity: alphabets must share symbols");
  std::vector<std::vector<double>> rows(from.size(), std::vector<double>(to.size(), 0.0));
  for (size_t i = 0; i < from.size(); ++i) rows[i][i] = 1.0;
  return ConditionalPmf({std::move(from)}, std::move(to), std::move(rows));
}

ConditionalPmf ConditionalPmf::bsc(Alphabet from, Alphabet to, double eps) {
  if (from.size() != 2 || to.size() != 2)
    throw std::invalid_argument("ConditionalPmf::bsc: alphabets must be binary");
  if (eps < 0.0 || eps > 1.0) throw std::invalid_argument("ConditionalPmf::bsc: eps outside [0,1]");
  return ConditionalPmf({std::move(from)}, std::move(to),
                        {{1.0 - eps, eps}, {eps, 1.0 - eps}});
}

}  // namespace coordlab
