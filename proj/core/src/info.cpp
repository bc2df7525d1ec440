#include "coordlab/info.hpp"

#include <cmath>
#include <stdexcept>
#include <unordered_set>

namespace coordlab {

namespace {
double entropy_of_weights(const std::vector<double>& w) {
  double h = 0.0;
  for (double p : w)
    if (p > 0.0) h -= p * std::log2(p);
  return h;
}

void check_groups_disjoint(const JointPmf& j, std::initializer_list<const std::vector<std::string>*> groups) {
  std::unordered_set<std::string> seen;
  for (const auto* g : groups) {
    if (g->empty()) throw std::invalid_argument("information measure: empty axis group");
    for (const auto& name : *g) {
      j.axis_index(name);  // throws on unknown axis
      if (!seen.insert(name).second)
        throw std::invalid_argument("information measure: axis '" + name + "' appears in two groups");
    }
  }
}

std::vector<std::string> concat(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  std::vector<std::string> out = a;
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

// tiny negatives from entropy cancellation are roundoff, not signal
double clamp_roundoff(double v) { return (v < 0.0 && v > -1e-9) ? 0.0 : v; }
}  // namespace

double binary_entropy(double p) {
  if (p < 0.0 || p > 1.0) throw std::invalid_argument("binary_entropy: p outside [0,1]");
  double h = 0.0;
  if (p > 0.0) h -= p * std::log2(p);
  if (p < 1.0) h -= (1.0 - p) * std::log2(1.0 - p);
  return h;
}

double entropy(const Pmf& p) { return entropy_of_weights(p.mass()); }

double entropy(const JointPmf& j) { return entropy_of_weights(j.mass()); }

double group_entropy(const JointPmf& j, const std::vector<std::string>& axes) {
  if (axes.size() == j.axes().size()) return entropy(j);
  return entropy(marginalize(j, axes));
}

double mutual_information(const JointPmf& j, const std::vector<std::string>& group_a,
                          const std::vector<std::string>& group_b) {
  check_groups_disjoint(j, {&group_a, &group_b});
  const double h_a = group_entropy(j, group_a);
  const double h_b = group_entropy(j, group_b);
  const double h_ab = group_entropy(j, concat(group_a, group_b));
  return clamp_roundoff(h_a + h_b - h_ab);
}

double conditional_mutual_information(const JointPmf& j, const std::vector<std::string>& group_a,
                                      const std::vector<std::string>& group_b,
                                      const std::vector<std::string>& group_c) {
  check_groups_disjoint(j, {&group_a, &group_b, &group_c});
  const double h_ac = group_entropy(j, concat(group_a, group_c));
  const double h_bc = group_entropy(j, concat(group_b, group_c));
  const double h_abc = group_entropy(j, concat(concat(group_a, group_b), group_c));
  const double h_c = group_entropy(j, group_c);
  return clamp_roundoff(h_ac + h_bc - h_abc - h_c);
}

double total_variation(const JointPmf& p, const JointPmf& q) {
  if (!p.same_axes(q)) throw std::invalid_argument("total_variation: axis mismatch");
  double acc = 0.0;
  for (size_t i = 0; i < p.cell_count(); ++i) acc += std::abs(p.prob_flat(i) - q.prob_flat(i));
  return 0.5 * acc;
}

double total_variation(const Pmf& p, const Pmf& q) {
  if (!(p.alphabet() == q.alphabet())) throw std::invalid_argument("total_variation: alphabet mismatch");
  double acc = 0.0;
  for (size_t i = 0; i < p.size(); ++i) acc += std::abs(p[i] - q[i]);
  return 0.5 * acc;
}

}  // namespace coordlab
