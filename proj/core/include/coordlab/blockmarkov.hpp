#pragma once

#include "coordlab/codebook.hpp"
#include "coordlab/region.hpp"

namespace coordlab {

// Rate bookkeeping for the block-Markov scheme. W denotes the codeword role
// carried per bin: X itself for a strictly causal witness, the auxiliary U
// for a causal one. Covering needs R_v above I(S;V|W), channel decoding
// needs R_m below I(W;Y), and in-bin decoding needs R_v - R_m below
// I(V;Y|W). When I(V;Y|W) vanishes (every strictly causal witness has
// I(V;Y|X) = 0) the builder forces singleton bins, R_m = R_v.
struct BlockMarkovRates {
  double i_svw = 0.0;   // I(S;V|W)
  double i_wy = 0.0;    // I(W;Y)
  double i_vyw = 0.0;   // I(V;Y|W)
  double slack = 0.0;   // I(W,V;Y) - I(W,V;S)
  double margin = 0.0;
  double rate_v = 0.0;
  double rate_m = 0.0;
  bool singleton_bins = false;
  bool feasible = false;
  std::vector<std::string> violations;
};

// Computes the rate system for a witness; margin < 0 selects
// min(slack/4, 0.04).
BlockMarkovRates blockmarkov_rates(const CoordinationTarget& t, const Witness& w, double margin);

// Testing knob: build at explicitly chosen (usually infeasible) rates.
struct ForcedRates {
  double rate_v;
  double rate_m;
};

struct BlockMarkovBuildOptions {
  double margin = -1.0;
  EpsilonPolicy eps_policy = EpsilonPolicy::schedule();
  std::optional<double> eps_enc;
  std::optional<double> eps_dec;
  std::optional<ForcedRates> force_rates;
};

struct BlockMarkovCode {
  Witness witness;
  bool causal = false;  // false: strictly causal (W = X); true: causal (W = U)
  size_t n = 0;
  size_t B = 0;
  BlockMarkovRates rates;
  IidCodebook v_words;                 // covering codebook over V
  std::vector<uint32_t> bin_of;        // empty when bins are singletons
  std::vector<std::vector<uint32_t>> bin_members;  // empty when singletons
  IidCodebook w_words;                 // per-bin codeword over X (strict) or U (causal)
  std::optional<SymbolMap> enc_map;    // x(s,u), causal only
  SymbolMap dec_map;                   // shat(v,y) or shat(u,v,y)
  double eps_enc = 0.0;
  double eps_dec = 0.0;
  JointPmf cover_joint;  // (S,X,V) or (U,S,V): encoder typicality reference
  JointPmf wy_joint;     // (X,Y) or (U,Y): channel decoding reference
  JointPmf vwy_joint;    // (X,V,Y) or (U,V,Y): in-bin decoding reference

  size_t bin_count() const;
  uint32_t bin_index(size_t codeword) const;
  std::span<const uint32_t> members_of(size_t bin) const;
};

// Throws RateError (with the violated inequalities) when the witness cannot
// support the margins, CodebookLimitError past the codeword cap. B >= 2.
BlockMarkovCode build_blockmarkov(const CoordinationTarget& t, const Witness& w, size_t n,
                                  size_t B, const BlockMarkovBuildOptions& opt, Rng& rng);

struct BmEncodeResult {
  size_t codeword = 0;  // chosen covering index l
  size_t bin = 0;       // its bin index m, i.e. the transmitted message
  bool cover_ok = false;
  size_t scanned = 0;
  SequenceBlock x;  // channel input for the current block
};

// Encoder step for block i >= 2: find a V codeword jointly typical with the
// previous block's (source, W) pair, transmit its bin. `w_prev` is the
// previous block's X codeword in the strictly causal scheme and its U
// codeword in the causal one; `s_cur` feeds the symbol map x(s,u) and is
// ignored by the strictly causal scheme (its channel input may not see the
// current source).
BmEncodeResult bm_encode_block(const BlockMarkovCode& code, const SequenceBlock& s_prev,
                               const SequenceBlock& w_prev, const SequenceBlock& s_cur,
                               Rng& rng);

struct BmDecodeResult {
  DecodeStatus bin_status = DecodeStatus::none_typical;
  size_t bin = 0;  // fallback-resolved bin belief
  DecodeStatus v_status = DecodeStatus::none_typical;
  size_t codeword = 0;
  SequenceBlock shat;  // reconstruction of the previous block's source
};

// Decoder step for block i >= 2: recover the bin from this block's channel
// output, then the codeword inside it using the previous block's decoded W
// codeword and channel output as side information, and reconstruct block
// i-1 symbol by symbol.
BmDecodeResult bm_decode_block(const BlockMarkovCode& code, const SequenceBlock& y_cur,
                               const SequenceBlock& w_prev_decoded,
                               const SequenceBlock& y_prev);

struct BlockResult {
  bool cover_ok = false;
  bool bin_decode_ok = false;  // channel stage recovered a unique bin index
  bool v_decode_ok = false;    // in-bin stage recovered a unique codeword
  bool indices_correct = false;
  DecodeStatus bin_status = DecodeStatus::none_typical;
  DecodeStatus v_status = DecodeStatus::none_typical;
  double tv_distance = 1.0;
};

struct ChainResult {
  size_t n = 0;
  size_t B = 0;
  uint64_t seed = 0;
  // exactly B-1 entries: block i is reconstructed while block i+1 is on air
  std::vector<BlockResult> per_block;
  // per-block sequences kept for inspection (sizes B each)
  std::vector<SequenceBlock> s_blocks, x_blocks, y_blocks;
  // reconstructions of blocks 1..B-1
  std::vector<SequenceBlock> shat_blocks;
  // encoder-side bin/codeword choices per block (index 0 = block 1) and the
  // decoder's bin beliefs; codeword entries are meaningful for blocks >= 2
  std::vector<size_t> sent_bins, sent_codewords, decoded_bins, decoded_codewords;
};

// Runs a B-block chain end to end. Block 1 is carried by the fixed index-0
// codeword and block B's source is never reconstructed; the decoder is
// bootstrapped with that same fixed first index. `sources`, when given,
// overrides the drawn source blocks (used by the causality tests).
ChainResult run_chain(const BlockMarkovCode& code, const CoordinationTarget& target, Rng& rng,
                      std::span<const SequenceBlock> sources = {});

}  // namespace coordlab
