#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "coordlab/joint.hpp"
#include "coordlab/rng.hpp"
#include "coordlab/symbol_map.hpp"

namespace coordlab {

// Length-n run of symbols from one alphabet, stored as indices. Alphabets
// are small here; one byte per symbol keeps the Monte Carlo loops cache
// friendly.
struct SequenceBlock {
  Alphabet alphabet;
  std::vector<uint8_t> symbols;

  size_t length() const { return symbols.size(); }
  SequenceBlock renamed(std::string axis_name) const {
    return SequenceBlock{alphabet.renamed(std::move(axis_name)), symbols};
  }
};

SequenceBlock sample_iid(const Pmf& p, size_t n, Rng& rng);

// Per-position independent draw from the row selected by the input tuple.
SequenceBlock sample_through(const ConditionalPmf& c, std::span<const SequenceBlock> inputs,
                             Rng& rng);

// Symbol-by-symbol application of a deterministic map.
SequenceBlock apply_map(const SymbolMap& m, std::span<const SequenceBlock> inputs);

// Tuple-frequency joint of aligned blocks; axes take the blocks' alphabets
// in the given order. Every weight is a multiple of 1/n.
JointPmf empirical_joint(std::span<const SequenceBlock> blocks);

// TV(empirical, target) <= eps. Blocks must be ordered like the target axes.
bool is_typical(std::span<const SequenceBlock> blocks, const JointPmf& target, double eps);

double empirical_tv(std::span<const SequenceBlock> blocks, const JointPmf& target);

// Incremental typicality scoring against a fixed target, used by the codec
// scan loops: counts are accumulated into a caller-provided buffer indexed
// by the flattened symbol tuple, then scored as
//   TV = sum_k |count_k - n*target_k| / (2n).
class TypicalityScorer {
 public:
  explicit TypicalityScorer(const JointPmf& target);

  size_t cell_count() const { return scaled_target_.size(); }
  // |counts| == cell_count(), sum(counts) == n
  double tv_from_counts(std::span<const uint32_t> counts, size_t n) const;

 private:
  std::vector<double> scaled_target_;  // target mass
};

}  // namespace coordlab
