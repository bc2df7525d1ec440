#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "coordlab/symbol_map.hpp"
#include "coordlab/target.hpp"

namespace coordlab {

enum class Scheme { noncausal, causal, strictly_causal, separation };

std::string_view scheme_name(Scheme s);
Scheme scheme_from_name(std::string_view name);

// Auxiliary-variable certificate for region membership. Factor and map keys
// are fixed per scheme:
//   noncausal:       factors {"U|S"}            maps {"x"(S,U), "shat"(U,Y)}
//   causal:          factors {"U", "V|SU"}      maps {"x"(S,U), "shat"(U,V,Y)}
//   strictly_causal: factors {"X", "V|XS"}      maps {"shat"(V,Y)}
//   separation:      factors {"Shat|S", "X"}    maps {}
// slack_bits = information-constraint RHS - LHS under the composed joint;
// nonnegative for a valid witness.
struct Witness {
  Scheme scheme = Scheme::noncausal;
  std::vector<Alphabet> aux_alphabets;
  std::map<std::string, ConditionalPmf> factors;
  std::map<std::string, SymbolMap> maps;
  double slack_bits = 0.0;
};

// The witness's full factorization, composed from the target's problem
// parameters (P_S, P_{Y|X}) and the witness's own factors and maps. Axis
// order keeps (S, X, Y, Shat) as a subsequence:
//   noncausal       -> (S, U, X, Y, Shat)
//   causal          -> (U, S, V, X, Y, Shat)
//   strictly_causal -> (S, X, V, Y, Shat)
//   separation      -> (S, X, Y, Shat)
JointPmf witness_joint(const CoordinationTarget& t, const Witness& w);

// Constraint sides in bits: {LHS, RHS} with membership requiring LHS <= RHS.
std::pair<double, double> witness_constraint(const JointPmf& augmented, Scheme scheme);

struct CertificateCheck {
  bool valid = false;
  double marginal_tv = 0.0;  // TV(composed (S,X,Y,Shat) marginal, target joint)
  double lhs_bits = 0.0;
  double rhs_bits = 0.0;
  double slack_bits = 0.0;   // rhs - lhs
  std::string diagnostic;
};

// Recomposes the witness from scratch and checks it against the target; the
// verifier never looks at how the witness was produced.
CertificateCheck verify_witness(const CoordinationTarget& t, const Witness& w,
                                double match_tol = 1e-6, double slack_tol = 1e-9);

// Region containments, realized constructively.
// A separation witness lifts to the noncausal scheme with U = (X, Shat).
Witness separation_to_noncausal(const CoordinationTarget& t, const Witness& separation_witness);
// A strictly causal witness lifts to the causal scheme with U taking X's role.
Witness strict_to_causal(const Witness& strictly_causal_witness);

}  // namespace coordlab
