#pragma once

#include <limits>
#include <optional>

#include "coordlab/rng.hpp"
#include "coordlab/witness.hpp"

namespace coordlab {

// Knobs for the heuristic membership searches. The continuous part runs a
// multi-start coordinate search on the probability simplices (pairwise mass
// transfers with a shrinking step); deterministic symbol maps are enumerated
// exhaustively while the combined map space stays within `map_enum_cap`, and
// sampled per start beyond that. Total descents are capped at
// starts * descent_cap_factor and spread across map combinations.
struct SearchConfig {
  int starts = 64;
  int max_sweeps = 400;
  double init_step = 0.25;
  double min_step = 1e-9;
  double match_tol = 1e-6;
  double slack_tol = 1e-9;
  uint64_t seed = 0x5eed;
  int threads = 1;
  size_t map_enum_cap = 4096;
  int map_samples = 64;
  int descent_cap_factor = 64;
  std::optional<Witness> hint;
};

enum class MembershipStatus { member_with_witness, not_found, infeasible_factorization };

std::string_view membership_status_name(MembershipStatus s);

struct SearchLog {
  uint64_t iterations = 0;  // residual evaluations
  double best_residual = std::numeric_limits<double>::infinity();
  double best_slack = -std::numeric_limits<double>::infinity();
  std::string note;
};

struct MembershipVerdict {
  MembershipStatus status = MembershipStatus::not_found;
  std::optional<Witness> witness;
  SearchLog log;
};

// Default auxiliary cardinalities (no bound is imposed by the theory here;
// these give support-lemma-style headroom and are overridable everywhere).
size_t default_card_u(const CoordinationTarget& t);
size_t default_card_v(const CoordinationTarget& t);

// Heuristic membership in the noncausal inner region. not_found is not a
// proof of non-membership: the region is an inner bound and the search is
// local.
MembershipVerdict check_noncausal_inner(const CoordinationTarget& t, size_t card_u,
                                        const SearchConfig& cfg = {});

// Exact-region checks for the causal / strictly causal encoders; the search
// itself is still heuristic, so not_found remains inconclusive (noted in the
// verdict log).
MembershipVerdict check_causal(const CoordinationTarget& t, size_t card_u, size_t card_v,
                               const SearchConfig& cfg = {});
MembershipVerdict check_strictly_causal(const CoordinationTarget& t, size_t card_v,
                                        const SearchConfig& cfg = {});

// Deterministic: member iff the joint splits as P_{S,Shat} x P_{X,Y} within
// match_tol and I(S;Shat) <= I(X;Y) + slack_tol.
MembershipVerdict check_separation(const CoordinationTarget& t,
                                   double match_tol = kFactorizationTol,
                                   double slack_tol = 1e-9);

// Binary source Bern(p) through BSC(eps), with both the channel input and
// the reconstruction at Hamming distance d from the source. Requires
// eps <= d <= p <= 1/2 and d < 1/2. Returns the target together with its
// closed-form noncausal witness (U = X = Shat, X ~ Bern((p-d)/(1-2d))).
std::pair<CoordinationTarget, Witness> make_binary_example(double p, double eps, double d);

// State-reproduction target: S ~ Bern(p) reproduced losslessly (Shat = S)
// while X ~ Bern(1/2) independent of S drives a BSC(channel_eps). Witness is
// strictly causal with V = S.
std::pair<CoordinationTarget, Witness> make_lossless_state(double p, double channel_eps);

struct BruteForceConfig {
  double grid_step = 0.05;
  // acceptance tolerance on the marginal residual; negative means "use
  // grid_step", which matches the grid's own resolution
  double match_tol = -1.0;
  double slack_tol = 1e-9;
  size_t max_points = 10'000'000;
};

// Exhaustive grid over the scheme's conditionals plus full enumeration of its
// symbol maps; intended as the oracle for the heuristic searches at test
// scale (binary alphabets). The best point minimizes marginal residual, with
// larger slack breaking ties. Throws when the grid would exceed max_points.
MembershipVerdict brute_force_membership(const CoordinationTarget& t, Scheme region,
                                         size_t card_u, size_t card_v,
                                         const BruteForceConfig& cfg = {});

}  // namespace coordlab
