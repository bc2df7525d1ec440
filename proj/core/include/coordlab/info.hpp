#pragma once

#include <string>
#include <vector>

#include "coordlab/joint.hpp"

namespace coordlab {

// All information measures are in bits (base-2 logs), with 0 log 0 = 0.

double binary_entropy(double p);

double entropy(const Pmf& p);
double entropy(const JointPmf& j);

// Entropy of the marginal over a group of axes.
double group_entropy(const JointPmf& j, const std::vector<std::string>& axes);

// I(A;B) = H(A) + H(B) - H(A,B); groups must be disjoint, nonempty, known.
double mutual_information(const JointPmf& j, const std::vector<std::string>& group_a,
                          const std::vector<std::string>& group_b);

// I(A;B|C) = H(A,C) + H(B,C) - H(A,B,C) - H(C)
double conditional_mutual_information(const JointPmf& j, const std::vector<std::string>& group_a,
                                      const std::vector<std::string>& group_b,
                                      const std::vector<std::string>& group_c);

// Half L1 distance; lands in [0,1]. Axes must match exactly.
double total_variation(const JointPmf& p, const JointPmf& q);
double total_variation(const Pmf& p, const Pmf& q);

}  // namespace coordlab
