#pragma once

#include <cmath>
#include <vector>

#include "coordlab/joint.hpp"
#include "coordlab/rng.hpp"

namespace testutil {

// independent closed-form oracle for binary entropy, bits
inline double h2(double p) {
  double h = 0.0;
  if (p > 0.0) h -= p * std::log2(p);
  if (p < 1.0) h -= (1.0 - p) * std::log2(1.0 - p);
  return h;
}

inline bool close(double a, double b, double tol) { return std::abs(a - b) <= tol; }

inline std::vector<double> random_simplex(size_t k, coordlab::Rng& rng) {
  std::vector<double> w(k);
  double sum = 0.0;
  for (auto& v : w) {
    v = -std::log(1.0 - rng.next_unit());
    sum += v;
  }
  for (auto& v : w) v /= sum;
  return w;
}

inline coordlab::JointPmf random_joint(const std::vector<size_t>& sizes, coordlab::Rng& rng) {
  std::vector<coordlab::Alphabet> axes;
  size_t total = 1;
  for (size_t i = 0; i < sizes.size(); ++i) {
    axes.push_back(coordlab::Alphabet::indexed(std::string(1, static_cast<char>('A' + i)),
                                               sizes[i]));
    total *= sizes[i];
  }
  return coordlab::JointPmf(std::move(axes), random_simplex(total, rng));
}

}  // namespace testutil
