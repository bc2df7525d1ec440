#pragma once

#include "coordlab/codebook.hpp"
#include "coordlab/region.hpp"

namespace coordlab {

// Hybrid analog/digital code: a covering codebook over the auxiliary
// alphabet (the digital part) combined with the witness's symbol-by-symbol
// maps x(s,u) and shat(u,y) (the analog part). The codebook rate sits
// strictly between I(U;S) and I(U;Y); the margin splits the witness slack.
struct HybridCode {
  Witness witness;
  size_t n = 0;
  double rate = 0.0;
  double rate_margin = 0.0;
  IidCodebook codewords;  // over U, i.i.d. P_U
  SymbolMap enc_map;      // x(s,u)
  SymbolMap dec_map;      // shat(u,y)
  double eps_enc = 0.0;
  double eps_dec = 0.0;
  double i_us = 0.0;
  double i_uy = 0.0;
  JointPmf su_joint;  // encoder typicality reference (S,U)
  JointPmf uy_joint;  // decoder typicality reference (U,Y)
};

struct HybridBuildOptions {
  // negative: min(slack/3, 0.05)
  double rate_margin = -1.0;
  EpsilonPolicy eps_policy = EpsilonPolicy::schedule();
  std::optional<double> eps_enc;
  std::optional<double> eps_dec;
  // testing knob: pin the codebook rate and skip the rate-window checks
  std::optional<double> rate_override;
};

// Throws RateError when the witness slack cannot fit twice the margin and
// CodebookLimitError when 2^ceil(nR) exceeds the codeword cap.
HybridCode build_hybrid(const CoordinationTarget& t, const Witness& w, size_t n,
                        const HybridBuildOptions& opt, Rng& rng);

struct HybridEncodeResult {
  size_t index = 0;
  bool encode_ok = false;
  size_t scanned = 0;
  SequenceBlock x;
};

// First codeword jointly typical with the source block under an rng-derived
// scan order; on covering failure a uniformly random codeword is used and
// transmission still happens.
HybridEncodeResult hybrid_encode(const HybridCode& code, const SequenceBlock& s_block, Rng& rng);

struct HybridDecodeResult {
  DecodeStatus status = DecodeStatus::none_typical;
  size_t index = 0;  // fallback-resolved: first typical when ambiguous, 0 when none
  SequenceBlock shat;
};

// Unique jointly typical codeword against the channel output; scans the full
// table. A reconstruction is always produced, from the fallback index when
// decoding fails.
HybridDecodeResult hybrid_decode(const HybridCode& code, const SequenceBlock& y_block);

TrialResult run_hybrid_trial(const HybridCode& code, const CoordinationTarget& target, Rng& rng);

// Separation baseline: a source codebook over Shat glued to a channel
// codebook over X by the message index.
struct SeparationCode {
  size_t n = 0;
  double rate = 0.0;
  IidCodebook source_words;   // over Shat, i.i.d. P_Shat
  IidCodebook channel_words;  // over X, i.i.d. P_X
  double eps_enc = 0.0;
  double eps_dec = 0.0;
  double i_ssh = 0.0;
  double i_xy = 0.0;
  JointPmf ssh_joint;  // (S,Shat)
  JointPmf xy_joint;   // (X,Y)
};

struct SeparationBuildOptions {
  // negative: min(slack/4, 0.04) each
  double source_margin = -1.0;
  double channel_margin = -1.0;
  EpsilonPolicy eps_policy = EpsilonPolicy::schedule();
  std::optional<double> eps_enc;
  std::optional<double> eps_dec;
};

// Requires check_separation(t) to accept with slack above the two margins.
SeparationCode build_separation(const CoordinationTarget& t, size_t n,
                                const SeparationBuildOptions& opt, Rng& rng);

TrialResult run_separation_trial(const SeparationCode& code, const CoordinationTarget& target,
                                 Rng& rng);

}  // namespace coordlab
