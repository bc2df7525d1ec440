#include "coordlab/hybrid.hpp"

#include <cmath>
#include <cstring>

namespace coordlab {

namespace {

// TV between the empirical pair distribution of (a, b) and `ref`, whose
// cells are laid out as a-index * nb + b-index.
double pair_tv(const uint8_t* a, const uint8_t* b, size_t n, size_t na, size_t nb,
               const double* ref) {
  uint32_t counts[256];
  const size_t cells = na * nb;
  if (cells > 256) throw std::invalid_argument("pair_tv: product alphabet too large");
  std::memset(counts, 0, cells * sizeof(uint32_t));
  for (size_t i = 0; i < n; ++i) ++counts[a[i] * nb + b[i]];
  const double dn = static_cast<double>(n);
  double acc = 0.0;
  for (size_t k = 0; k < cells; ++k)
    acc += std::abs(static_cast<double>(counts[k]) - dn * ref[k]);
  return acc / (2.0 * dn);
}

size_t rate_to_bits(size_t n, double rate) {
  if (rate <= 0.0) return 0;
  return static_cast<size_t>(std::ceil(static_cast<double>(n) * rate - 1e-12));
}

double default_margin(double slack, double divisor, double cap) {
  return std::max(0.0, std::min(slack / divisor, cap));
}

// scans `book` against a fixed block, looking for the unique codeword whose
// pair with `fixed` is typical; stops at the second hit
struct UniqueScan {
  DecodeStatus status = DecodeStatus::none_typical;
  size_t first = 0;
};

UniqueScan unique_typical(const IidCodebook& book, const uint8_t* fixed, size_t n, size_t nfx,
                          const double* ref, double eps) {
  UniqueScan r;
  const size_t nbook = book.law().alphabet().size();
  std::vector<uint8_t> scratch;
  size_t hits = 0;
  for (size_t i = 0; i < book.count(); ++i) {
    const uint8_t* cw = book.materialized_codeword(i);
    if (!cw) {
      scratch.resize(n);
      book.generate_codeword(i, scratch);
      cw = scratch.data();
    }
    if (pair_tv(cw, fixed, n, nbook, nfx, ref) <= eps) {
      if (++hits == 1) {
        r.first = i;
      } else {
        r.status = DecodeStatus::ambiguous;
        return r;
      }
    }
  }
  r.status = hits == 1 ? DecodeStatus::ok : DecodeStatus::none_typical;
  return r;
}

}  // namespace

HybridCode build_hybrid(const CoordinationTarget& t, const Witness& w, size_t n,
                        const HybridBuildOptions& opt, Rng& rng) {
  if (w.scheme != Scheme::noncausal)
    throw std::invalid_argument("build_hybrid: witness must be noncausal");
  if (n < 1) throw std::invalid_argument("build_hybrid: n must be >= 1");

  HybridCode code;
  code.witness = w;
  code.n = n;
  const JointPmf augmented = witness_joint(t, w);
  auto [i_us, i_uy] = witness_constraint(augmented, Scheme::noncausal);
  code.i_us = i_us;
  code.i_uy = i_uy;
  const double slack = i_uy - i_us;
  const size_t card_u = w.factors.at("U|S").to().size();
  const bool degenerate = card_u == 1;

  code.rate_margin = opt.rate_margin < 0.0 ? default_margin(slack, 3.0, 0.05) : opt.rate_margin;
  if (opt.rate_override) {
    code.rate = *opt.rate_override;
  } else if (degenerate) {
    code.rate = 0.0;  // single repeated codeword
  } else {
    if (slack <= 2.0 * code.rate_margin - 1e-15)
      throw RateError("build_hybrid: witness slack " + std::to_string(slack) +
                      " bits cannot fit twice the rate margin " +
                      std::to_string(code.rate_margin));
    code.rate = i_us + code.rate_margin;
    if (code.rate >= i_uy - code.rate_margin + 1e-15)
      throw RateError("build_hybrid: rate " + std::to_string(code.rate) +
                      " is not below I(U;Y) - margin");
  }

  const size_t bits = rate_to_bits(n, code.rate);
  code.codewords = IidCodebook(marginal_pmf(augmented, kAxisU), n, bits, rng.next_u64());
  code.enc_map = w.maps.at("x");
  code.dec_map = w.maps.at("shat");
  code.eps_enc = opt.eps_enc.value_or(opt.eps_policy.value(n));
  code.eps_dec = opt.eps_dec.value_or(opt.eps_policy.value(n));
  code.su_joint = marginalize(augmented, {kAxisS, kAxisU});
  code.uy_joint = marginalize(augmented, {kAxisU, kAxisY});
  return code;
}

HybridEncodeResult hybrid_encode(const HybridCode& code, const SequenceBlock& s_block, Rng& rng) {
  if (s_block.length() != code.n) throw std::invalid_argument("hybrid_encode: block length mismatch");
  HybridEncodeResult out;
  const size_t count = code.codewords.count();
  const size_t nu = code.codewords.law().alphabet().size();
  const double* ref = code.su_joint.mass().data();
  ScanOrder order(code.codewords.bits(), rng);
  std::vector<uint8_t> scratch;
  bool found = false;
  for (size_t tpos = 0; tpos < count; ++tpos) {
    const size_t i = order.at(tpos);
    const uint8_t* cw = code.codewords.materialized_codeword(i);
    if (!cw) {
      scratch.resize(code.n);
      code.codewords.generate_codeword(i, scratch);
      cw = scratch.data();
    }
    ++out.scanned;
    if (pair_tv(s_block.symbols.data(), cw, code.n, s_block.alphabet.size(), nu, ref) <=
        code.eps_enc) {
      out.index = i;
      found = true;
      break;
    }
  }
  out.encode_ok = found;
  if (!found) out.index = rng.next_below(count);  // transmit anyway

  const SequenceBlock u = code.codewords.codeword_block(out.index);
  const std::vector<SequenceBlock> inputs{s_block, u};
  out.x = apply_map(code.enc_map, inputs);
  return out;
}

HybridDecodeResult hybrid_decode(const HybridCode& code, const SequenceBlock& y_block) {
  if (y_block.length() != code.n) throw std::invalid_argument("hybrid_decode: block length mismatch");
  HybridDecodeResult out;
  if (code.codewords.count() == 1) {
    out.status = DecodeStatus::ok;  // degenerate book: nothing to distinguish
    out.index = 0;
  } else {
    const UniqueScan scan =
        unique_typical(code.codewords, y_block.symbols.data(), code.n, y_block.alphabet.size(),
                       code.uy_joint.mass().data(), code.eps_dec);
    out.status = scan.status;
    out.index = scan.status == DecodeStatus::none_typical ? 0 : scan.first;
  }
  const SequenceBlock u = code.codewords.codeword_block(out.index);
  const std::vector<SequenceBlock> inputs{u, y_block};
  out.shat = apply_map(code.dec_map, inputs);
  return out;
}

TrialResult run_hybrid_trial(const HybridCode& code, const CoordinationTarget& target, Rng& rng) {
  TrialResult r;
  r.n = code.n;
  r.seed = rng.seed();
  const SequenceBlock s = sample_iid(target.source, code.n, rng);
  HybridEncodeResult enc = hybrid_encode(code, s, rng);
  const std::vector<SequenceBlock> chan_in{enc.x};
  const SequenceBlock y = sample_through(target.channel, chan_in, rng);
  HybridDecodeResult dec = hybrid_decode(code, y);
  r.encode_ok = enc.encode_ok;
  r.decode_ok = dec.status == DecodeStatus::ok;
  r.decoded_index_correct = r.decode_ok && dec.index == enc.index;
  const std::vector<SequenceBlock> tuple{s, enc.x, y, dec.shat};
  r.tv_distance = empirical_tv(tuple, target.joint);
  return r;
}

SeparationCode build_separation(const CoordinationTarget& t, size_t n,
                                const SeparationBuildOptions& opt, Rng& rng) {
  if (n < 1) throw std::invalid_argument("build_separation: n must be >= 1");
  MembershipVerdict sep = check_separation(t);
  if (sep.status != MembershipStatus::member_with_witness)
    throw RateError("build_separation: target is not in the separation region: " + sep.log.note);

  SeparationCode code;
  code.n = n;
  code.i_ssh = mutual_information(t.joint, {kAxisS}, {kAxisShat});
  code.i_xy = mutual_information(t.joint, {kAxisX}, {kAxisY});
  const double slack = code.i_xy - code.i_ssh;
  const double m_src =
      opt.source_margin < 0.0 ? default_margin(slack, 4.0, 0.04) : opt.source_margin;
  const double m_ch =
      opt.channel_margin < 0.0 ? default_margin(slack, 4.0, 0.04) : opt.channel_margin;

  size_t bits = 0;
  if (code.i_ssh > 1e-12) {
    if (slack <= m_src + m_ch - 1e-15)
      throw RateError("build_separation: slack " + std::to_string(slack) +
                      " bits cannot fit the margins");
    code.rate = code.i_ssh + m_src;
    if (code.rate >= code.i_xy - m_ch + 1e-15)
      throw RateError("build_separation: rate is not below I(X;Y) - margin");
    bits = rate_to_bits(n, code.rate);
  }

  code.source_words = IidCodebook(marginal_pmf(t.joint, kAxisShat), n, bits, rng.next_u64());
  code.channel_words = IidCodebook(marginal_pmf(t.joint, kAxisX), n, bits, rng.next_u64());
  code.eps_enc = opt.eps_enc.value_or(opt.eps_policy.value(n));
  code.eps_dec = opt.eps_dec.value_or(opt.eps_policy.value(n));
  code.ssh_joint = marginalize(t.joint, {kAxisS, kAxisShat});
  code.xy_joint = marginalize(t.joint, {kAxisX, kAxisY});
  return code;
}

TrialResult run_separation_trial(const SeparationCode& code, const CoordinationTarget& target,
                                 Rng& rng) {
  TrialResult r;
  r.n = code.n;
  r.seed = rng.seed();
  const SequenceBlock s = sample_iid(target.source, code.n, rng);

  // source encoding: cover s with a reconstruction codeword
  const size_t count = code.source_words.count();
  const size_t nh = code.source_words.law().alphabet().size();
  ScanOrder order(code.source_words.bits(), rng);
  std::vector<uint8_t> scratch;
  size_t index = 0;
  bool covered = count == 1;
  if (!covered) {
    for (size_t tpos = 0; tpos < count; ++tpos) {
      const size_t i = order.at(tpos);
      const uint8_t* cw = code.source_words.materialized_codeword(i);
      if (!cw) {
        scratch.resize(code.n);
        code.source_words.generate_codeword(i, scratch);
        cw = scratch.data();
      }
      if (pair_tv(s.symbols.data(), cw, code.n, s.alphabet.size(), nh,
                  code.ssh_joint.mass().data()) <= code.eps_enc) {
        index = i;
        covered = true;
        break;
      }
    }
    if (!covered) index = rng.next_below(count);
  }
  r.encode_ok = covered;

  // "bits as glue": the source index selects the channel codeword
  const SequenceBlock x = code.channel_words.codeword_block(index);
  const std::vector<SequenceBlock> chan_in{x};
  const SequenceBlock y = sample_through(target.channel, chan_in, rng);

  size_t decoded = 0;
  if (code.channel_words.count() == 1) {
    r.decode_ok = true;
  } else {
    const UniqueScan scan =
        unique_typical(code.channel_words, y.symbols.data(), code.n, y.alphabet.size(),
                       code.xy_joint.mass().data(), code.eps_dec);
    r.decode_ok = scan.status == DecodeStatus::ok;
    decoded = scan.status == DecodeStatus::none_typical ? 0 : scan.first;
  }
  r.decoded_index_correct = r.decode_ok && decoded == index;
  const SequenceBlock shat = code.source_words.codeword_block(decoded);
  const std::vector<SequenceBlock> tuple{s, x, y, shat};
  r.tv_distance = empirical_tv(tuple, target.joint);
  return r;
}

}  // namespace coordlab
