#include "coordlab/sequence.hpp"

#include <cmath>
#include <stdexcept>

namespace coordlab {

namespace {
uint8_t draw_index(std::span<const double> row, Rng& rng) {
  const double u = rng.next_unit();
  double acc = 0.0;
  for (size_t i = 0; i + 1 < row.size(); ++i) {
    acc += row[i];
    if (u < acc) return static_cast<uint8_t>(i);
  }
  return static_cast<uint8_t>(row.size() - 1);
}

void check_block_alphabet(const Alphabet& a) {
  if (a.size() > 256) throw std::invalid_argument("SequenceBlock: alphabet too large for byte storage");
}
}  // namespace

SequenceBlock sample_iid(const Pmf& p, size_t n, Rng& rng) {
  if (n < 1) throw std::invalid_argument("sample_iid: n must be >= 1");
  check_block_alphabet(p.alphabet());
  SequenceBlock b{p.alphabet(), std::vector<uint8_t>(n)};
  std::span<const double> row(p.mass().data(), p.mass().size());
  for (size_t i = 0; i < n; ++i) b.symbols[i] = draw_index(row, rng);
  return b;
}

SequenceBlock sample_through(const ConditionalPmf& c, std::span<const SequenceBlock> inputs,
                             Rng& rng) {
  if (inputs.size() != c.from().size())
    throw std::invalid_argument("sample_through: input block count != conditioning rank");
  if (inputs.empty()) throw std::invalid_argument("sample_through: no input blocks");
  const size_t n = inputs[0].length();
  for (const auto& b : inputs) {
    if (b.length() != n) throw std::invalid_argument("sample_through: input blocks not aligned");
  }
  for (size_t k = 0; k < inputs.size(); ++k) {
    if (!inputs[k].alphabet.same_symbols(c.from()[k]))
      throw std::invalid_argument("sample_through: input alphabet mismatch at position " +
                                  std::to_string(k));
  }
  check_block_alphabet(c.to());
  SequenceBlock out{c.to(), std::vector<uint8_t>(n)};
  std::vector<size_t> tuple(inputs.size());
  for (size_t i = 0; i < n; ++i) {
    for (size_t k = 0; k < inputs.size(); ++k) tuple[k] = inputs[k].symbols[i];
    out.symbols[i] = draw_index(c.row(tuple), rng);
  }
  return out;
}

SequenceBlock apply_map(const SymbolMap& m, std::span<const SequenceBlock> inputs) {
  if (inputs.size() != m.from().size())
    throw std::invalid_argument("apply_map: input block count != map rank");
  const size_t n = inputs[0].length();
  for (size_t k = 0; k < inputs.size(); ++k) {
    if (inputs[k].length() != n) throw std::invalid_argument("apply_map: input blocks not aligned");
    if (!inputs[k].alphabet.same_symbols(m.from()[k]))
      throw std::invalid_argument("apply_map: input alphabet mismatch at position " +
                                  std::to_string(k));
  }
  check_block_alphabet(m.to());
  SequenceBlock out{m.to(), std::vector<uint8_t>(n)};
  std::vector<size_t> tuple(inputs.size());
  for (size_t i = 0; i < n; ++i) {
    for (size_t k = 0; k < inputs.size(); ++k) tuple[k] = inputs[k].symbols[i];
    out.symbols[i] = static_cast<uint8_t>(m.apply(tuple));
  }
  return out;
}

JointPmf empirical_joint(std::span<const SequenceBlock> blocks) {
  if (blocks.empty()) throw std::invalid_argument("empirical_joint: no blocks");
  const size_t n = blocks[0].length();
  if (n < 1) throw std::invalid_argument("empirical_joint: blocks must be nonempty");
  std::vector<Alphabet> axes;
  std::vector<size_t> sizes;
  for (const auto& b : blocks) {
    if (b.length() != n) throw std::invalid_argument("empirical_joint: blocks have mismatched lengths");
    axes.push_back(b.alphabet);
    sizes.push_back(b.alphabet.size());
  }
  ProductIndexer ix(sizes);
  std::vector<double> mass(ix.total(), 0.0);
  const double w = 1.0 / static_cast<double>(n);
  std::vector<size_t> tuple(blocks.size());
  for (size_t i = 0; i < n; ++i) {
    for (size_t k = 0; k < blocks.size(); ++k) tuple[k] = blocks[k].symbols[i];
    mass[ix.flat(tuple)] += w;
  }
  return JointPmf(std::move(axes), std::move(mass));
}

double empirical_tv(std::span<const SequenceBlock> blocks, const JointPmf& target) {
  JointPmf emp = empirical_joint(blocks);
  if (!emp.same_axes(target))
    throw std::invalid_argument("empirical_tv: block axes do not match the target joint");
  double acc = 0.0;
  for (size_t i = 0; i < emp.cell_count(); ++i)
    acc += std::abs(emp.prob_flat(i) - target.prob_flat(i));
  return 0.5 * acc;
}

bool is_typical(std::span<const SequenceBlock> blocks, const JointPmf& target, double eps) {
  if (eps < 0.0) throw std::invalid_argument("is_typical: eps must be >= 0");
  return empirical_tv(blocks, target) <= eps;
}

TypicalityScorer::TypicalityScorer(const JointPmf& target) : scaled_target_(target.mass()) {}

double TypicalityScorer::tv_from_counts(std::span<const uint32_t> counts, size_t n) const {
  const double dn = static_cast<double>(n);
  double acc = 0.0;
  for (size_t i = 0; i < scaled_target_.size(); ++i)
    acc += std::abs(static_cast<double>(counts[i]) - dn * scaled_target_[i]);
  return acc / (2.0 * dn);
}

}  // namespace coordlab
