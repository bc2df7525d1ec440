#include "coordlab/target.hpp"

#include <cmath>

namespace coordlab {

TargetValidation validate_target(const CoordinationTarget& t, double tol) {
  TargetValidation v;

  const auto& axes = t.joint.axes();
  if (axes.size() != 4 || axes[0].name() != kAxisS || axes[1].name() != kAxisX ||
      axes[2].name() != kAxisY || axes[3].name() != kAxisShat) {
    v.diagnostic = "joint axes must be (S, X, Y, Shat)";
    return v;
  }
  if (!axes[0].same_symbols(t.source.alphabet())) {
    v.diagnostic = "source alphabet does not match the joint's S axis";
    return v;
  }
  if (t.channel.from().size() != 1 || !t.channel.from()[0].same_symbols(axes[1]) ||
      !t.channel.to().same_symbols(axes[2])) {
    v.diagnostic = "channel alphabets do not match the joint's X/Y axes";
    return v;
  }

  const Pmf s_marginal = marginal_pmf(t.joint, kAxisS);
  v.source_residual = total_variation(Pmf(axes[0], s_marginal.mass()),
                                      Pmf(axes[0], t.source.mass()));
  if (v.source_residual > tol) {
    v.diagnostic = "S marginal deviates from the source by TV " + std::to_string(v.source_residual);
    return v;
  }

  // Y must depend on (S, X) only through X, and through the given channel.
  // Checking P_{Y|S=s,X=x} == channel(x) on positive-probability rows covers
  // both the Markov structure and the channel-consistency requirement.
  const ConditionalPmf y_given_sx =
      condition(marginalize(t.joint, {kAxisS, kAxisX, kAxisY}), {kAxisS, kAxisX});
  const size_t s_size = axes[0].size();
  const size_t x_size = axes[1].size();
  const size_t y_size = axes[2].size();
  double worst = 0.0;
  for (size_t s = 0; s < s_size; ++s) {
    for (size_t x = 0; x < x_size; ++x) {
      const size_t row_idx = s * x_size + x;
      if (y_given_sx.row_flagged(row_idx)) continue;
      auto got = y_given_sx.row(row_idx);
      auto want = t.channel.row(x);
      double tv = 0.0;
      for (size_t y = 0; y < y_size; ++y) tv += std::abs(got[y] - want[y]);
      worst = std::max(worst, 0.5 * tv);
    }
  }
  v.channel_residual = worst;
  if (worst > tol) {
    v.diagnostic = "P(Y | S, X) deviates from the channel by TV " + std::to_string(worst) +
                   " on a positive-probability row (joint does not factor as "
                   "P_S P_{X|S} P_{Y|X} P_{Shat|SXY})";
    return v;
  }

  v.ok = true;
  return v;
}

CoordinationTarget target_from_factors(const Pmf& source, const ConditionalPmf& channel,
                                       const ConditionalPmf& x_given_s,
                                       const ConditionalPmf& shat_given_sxy) {
  JointPmf joint = compose({
      factor(kAxisS, source),
      factor(kAxisX, {kAxisS}, x_given_s),
      factor(kAxisY, {kAxisX}, channel),
      factor(kAxisShat, {kAxisS, kAxisX, kAxisY}, shat_given_sxy),
  });
  return CoordinationTarget{source, channel, std::move(joint)};
}

}  // namespace coordlab
