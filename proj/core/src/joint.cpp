#include "coordlab/joint.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_set>

namespace coordlab {

JointPmf::JointPmf(std::vector<Alphabet> axes, std::vector<double> mass)
    : axes_(std::move(axes)) {
  if (axes_.empty()) throw std::invalid_argument("JointPmf: needs at least one axis");
  std::unordered_set<std::string> names;
  std::vector<size_t> sizes;
  sizes.reserve(axes_.size());
  for (const auto& a : axes_) {
    if (!names.insert(a.name()).second)
      throw std::invalid_argument("JointPmf: duplicate axis name '" + a.name() + "'");
    sizes.push_back(a.size());
  }
  ix_ = ProductIndexer(std::move(sizes));
  if (mass.size() != ix_.total())
    throw std::invalid_argument("JointPmf: mass size " + std::to_string(mass.size()) +
                                " != product space size " + std::to_string(ix_.total()));
  double sum = 0.0;
  for (double v : mass) {
    if (!(v >= 0.0) || !std::isfinite(v))
      throw std::invalid_argument("JointPmf: weights must be finite and nonnegative");
    sum += v;
  }
  if (std::abs(sum - 1.0) > kPmfSumTolerance)
    throw std::invalid_argument("JointPmf: weights sum to " + std::to_string(sum) +
                                ", outside the normalization tolerance");
  for (double& v : mass) v /= sum;
  mass_ = std::move(mass);
}

size_t JointPmf::axis_index(std::string_view name) const {
  for (size_t i = 0; i < axes_.size(); ++i)
    if (axes_[i].name() == name) return i;
  throw std::out_of_range("JointPmf: unknown axis '" + std::string(name) + "'");
}

bool JointPmf::has_axis(std::string_view name) const {
  for (const auto& a : axes_)
    if (a.name() == name) return true;
  return false;
}

bool JointPmf::same_axes(const JointPmf& other) const {
  if (axes_.size() != other.axes_.size()) return false;
  for (size_t i = 0; i < axes_.size(); ++i)
    if (axes_[i] != other.axes_[i]) return false;
  return true;
}

JointPmf marginalize(const JointPmf& j, const std::vector<std::string>& keep) {
  std::vector<size_t> kept_axes;
  for (const auto& name : keep) j.axis_index(name);  // validate names
  for (size_t i = 0; i < j.axes().size(); ++i)
    if (std::find(keep.begin(), keep.end(), j.axes()[i].name()) != keep.end())
      kept_axes.push_back(i);
  if (kept_axes.empty()) throw std::invalid_argument("marginalize: keep set is empty");

  std::vector<Alphabet> out_axes;
  std::vector<size_t> out_sizes;
  for (size_t i : kept_axes) {
    out_axes.push_back(j.axes()[i]);
    out_sizes.push_back(j.axes()[i].size());
  }
  ProductIndexer out_ix(out_sizes);
  std::vector<double> out_mass(out_ix.total(), 0.0);

  std::vector<size_t> tuple(j.axes().size());
  std::vector<size_t> out_tuple(kept_axes.size());
  for (size_t flat = 0; flat < j.cell_count(); ++flat) {
    j.indexer().unflat(flat, tuple);
    for (size_t k = 0; k < kept_axes.size(); ++k) out_tuple[k] = tuple[kept_axes[k]];
    out_mass[out_ix.flat(out_tuple)] += j.prob_flat(flat);
  }
  return JointPmf(std::move(out_axes), std::move(out_mass));
}

ConditionalPmf condition(const JointPmf& j, const std::vector<std::string>& given) {
  if (given.empty()) throw std::invalid_argument("condition: given set is empty");
  std::vector<size_t> given_axes;
  given_axes.reserve(given.size());
  for (const auto& name : given) given_axes.push_back(j.axis_index(name));

  std::optional<size_t> target_axis;
  for (size_t i = 0; i < j.axes().size(); ++i) {
    if (std::find(given_axes.begin(), given_axes.end(), i) != given_axes.end()) continue;
    if (target_axis)
      throw std::invalid_argument("condition: more than one axis remains; marginalize first");
    target_axis = i;
  }
  if (!target_axis) throw std::invalid_argument("condition: no axis remains");

  std::vector<Alphabet> from;
  std::vector<size_t> from_sizes;
  for (size_t i : given_axes) {
    from.push_back(j.axes()[i]);
    from_sizes.push_back(j.axes()[i].size());
  }
  const Alphabet& to = j.axes()[*target_axis];
  ProductIndexer row_ix(from_sizes);

  std::vector<std::vector<double>> rows(row_ix.total(), std::vector<double>(to.size(), 0.0));
  std::vector<size_t> tuple(j.axes().size());
  std::vector<size_t> row_tuple(given_axes.size());
  for (size_t flat = 0; flat < j.cell_count(); ++flat) {
    j.indexer().unflat(flat, tuple);
    for (size_t k = 0; k < given_axes.size(); ++k) row_tuple[k] = tuple[given_axes[k]];
    rows[row_ix.flat(row_tuple)][tuple[*target_axis]] += j.prob_flat(flat);
  }

  std::vector<size_t> zero_rows;
  for (size_t r = 0; r < rows.size(); ++r) {
    double sum = 0.0;
    for (double v : rows[r]) sum += v;
    if (sum <= 0.0) {
      // zero-probability conditioning event: uniform placeholder, flagged
      std::fill(rows[r].begin(), rows[r].end(), 1.0 / static_cast<double>(to.size()));
      zero_rows.push_back(r);
    } else {
      for (double& v : rows[r]) v /= sum;
    }
  }
  ConditionalPmf out(std::move(from), to, std::move(rows));
  for (size_t r : zero_rows) out.flag_row(r);
  return out;
}

ConditionalPmf conditional_of(const JointPmf& j, const std::string& target,
                              const std::vector<std::string>& given) {
  std::vector<std::string> keep = given;
  keep.push_back(target);
  return condition(marginalize(j, keep), given);
}

Pmf marginal_pmf(const JointPmf& j, const std::string& axis) {
  JointPmf m = marginalize(j, {axis});
  return Pmf(m.axes()[0], m.mass());
}

Factor factor(std::string axis, const Pmf& p) {
  ConditionalPmf c({}, p.alphabet(), {p.mass()});
  return Factor{std::move(axis), {}, std::move(c)};
}

Factor factor(std::string axis, std::vector<std::string> given, ConditionalPmf dist) {
  return Factor{std::move(axis), std::move(given), std::move(dist)};
}

JointPmf compose(const std::vector<Factor>& chain) {
  if (chain.empty()) throw std::invalid_argument("compose: empty chain");

  std::vector<Alphabet> axes;
  // per factor, the chain positions of its conditioning axes
  std::vector<std::vector<size_t>> given_pos(chain.size());
  for (size_t f = 0; f < chain.size(); ++f) {
    const Factor& fac = chain[f];
    if (fac.given.size() != fac.dist.from().size())
      throw std::invalid_argument("compose: factor '" + fac.axis +
                                  "' given-list rank != distribution conditioning rank");
    for (size_t g = 0; g < fac.given.size(); ++g) {
      bool found = false;
      for (size_t k = 0; k < axes.size(); ++k) {
        if (axes[k].name() == fac.given[g]) {
          if (!axes[k].same_symbols(fac.dist.from()[g]))
            throw std::invalid_argument("compose: factor '" + fac.axis + "' conditioning axis '" +
                                        fac.given[g] + "' has incompatible symbols");
          given_pos[f].push_back(k);
          found = true;
          break;
        }
      }
      if (!found)
        throw std::invalid_argument("compose: factor '" + fac.axis +
                                    "' conditions on axis '" + fac.given[g] +
                                    "' that is not earlier in the chain");
    }
    for (const auto& a : axes)
      if (a.name() == fac.axis)
        throw std::invalid_argument("compose: duplicate axis '" + fac.axis + "'");
    axes.push_back(fac.dist.to().renamed(fac.axis));
  }

  std::vector<size_t> sizes;
  for (const auto& a : axes) sizes.push_back(a.size());
  ProductIndexer ix(sizes);
  std::vector<double> mass(ix.total());
  std::vector<size_t> tuple(axes.size());
  std::vector<size_t> given_tuple;
  for (size_t flat = 0; flat < ix.total(); ++flat) {
    ix.unflat(flat, tuple);
    double p = 1.0;
    for (size_t f = 0; f < chain.size() && p > 0.0; ++f) {
      given_tuple.clear();
      for (size_t pos : given_pos[f]) given_tuple.push_back(tuple[pos]);
      p *= chain[f].dist.prob(given_tuple, tuple[f]);
    }
    mass[flat] = p;
  }
  return JointPmf(std::move(axes), std::move(mass));
}

}  // namespace coordlab
