#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "coordlab/pmf.hpp"

namespace coordlab {

// Joint distribution over an ordered list of named axes. Mass is a flat
// C-order array over the product space. Axis names are distinct.
class JointPmf {
 public:
  JointPmf() = default;
  JointPmf(std::vector<Alphabet> axes, std::vector<double> mass);

  const std::vector<Alphabet>& axes() const { return axes_; }
  const ProductIndexer& indexer() const { return ix_; }
  const std::vector<double>& mass() const { return mass_; }
  size_t cell_count() const { return mass_.size(); }

  size_t axis_index(std::string_view name) const;
  bool has_axis(std::string_view name) const;

  double prob(std::span<const size_t> tuple) const { return mass_[ix_.flat(tuple)]; }
  double prob_flat(size_t flat_index) const { return mass_[flat_index]; }

  bool same_axes(const JointPmf& other) const;

 private:
  std::vector<Alphabet> axes_;
  ProductIndexer ix_;
  std::vector<double> mass_;
};

// Sum out everything except `keep`; result axes follow the joint's own order.
JointPmf marginalize(const JointPmf& j, const std::vector<std::string>& keep);

// Conditional of the single remaining axis given `given` (marginalize first
// when more than one axis would remain). Rows whose conditioning event has
// zero probability come back flagged and filled uniformly.
ConditionalPmf condition(const JointPmf& j, const std::vector<std::string>& given);

// Conditional P(target | given) extracted from j, marginalizing out the rest.
ConditionalPmf conditional_of(const JointPmf& j, const std::string& target,
                              const std::vector<std::string>& given);

Pmf marginal_pmf(const JointPmf& j, const std::string& axis);

// One link of a factorization chain: an output axis, the names of the axes
// it is conditioned on (all of which must appear earlier in the chain), and
// the distribution. The distribution's own alphabet names are not binding;
// only sizes and symbol lists must line up with the bound axes.
struct Factor {
  std::string axis;
  std::vector<std::string> given;
  ConditionalPmf dist;
};

Factor factor(std::string axis, const Pmf& p);
Factor factor(std::string axis, std::vector<std::string> given, ConditionalPmf dist);

// Product joint of a factorization chain, axes in chain order.
JointPmf compose(const std::vector<Factor>& chain);

}  // namespace coordlab
