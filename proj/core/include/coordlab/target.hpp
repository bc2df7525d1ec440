#pragma once

#include <string>

#include "coordlab/info.hpp"
#include "coordlab/joint.hpp"

namespace coordlab {

// Canonical axis names used throughout.
inline constexpr const char* kAxisS = "S";
inline constexpr const char* kAxisX = "X";
inline constexpr const char* kAxisY = "Y";
inline constexpr const char* kAxisShat = "Shat";
inline constexpr const char* kAxisU = "U";
inline constexpr const char* kAxisV = "V";

// A candidate joint over (S, X, Y, Shat) together with the problem
// parameters it must be consistent with: the source law P_S and the channel
// P_{Y|X}. Consistency means the S marginal matches the source, and Y
// depends on (S, X) only through X, via the given channel.
struct CoordinationTarget {
  Pmf source;
  ConditionalPmf channel;
  JointPmf joint;  // axes S, X, Y, Shat in that order
};

struct TargetValidation {
  bool ok = false;
  std::string diagnostic;
  double source_residual = 0.0;   // TV(S marginal, source)
  double channel_residual = 0.0;  // max TV of P_{Y|S=s,X=x} vs channel row x over positive rows
};

// Default tolerance for target/witness consistency checks.
inline constexpr double kFactorizationTol = 1e-9;

TargetValidation validate_target(const CoordinationTarget& t, double tol = kFactorizationTol);

// Builds a target by composing P_S * P_{X|S} * P_{Y|X} * P_{Shat|SXY};
// such a target passes validation by construction.
CoordinationTarget target_from_factors(const Pmf& source, const ConditionalPmf& channel,
                                       const ConditionalPmf& x_given_s,
                                       const ConditionalPmf& shat_given_sxy);

}  // namespace coordlab
