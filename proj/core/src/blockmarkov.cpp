#include "coordlab/blockmarkov.hpp"

#include <cmath>
#include <cstring>

namespace coordlab {

namespace {

size_t rate_to_bits(size_t n, double rate) {
  if (rate <= 0.0) return 0;
  return static_cast<size_t>(std::ceil(static_cast<double>(n) * rate - 1e-12));
}

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

// triple typicality against a fixed context: cell = base[i] + mult * cw[i]
double keyed_tv(const uint8_t* cw, const uint32_t* base, size_t mult, size_t n, size_t cells,
                const double* ref) {
  uint32_t counts[1024];
  if (cells > 1024) throw std::invalid_argument("keyed_tv: product alphabet too large");
  std::memset(counts, 0, cells * sizeof(uint32_t));
  for (size_t i = 0; i < n; ++i) ++counts[base[i] + mult * cw[i]];
  const double dn = static_cast<double>(n);
  double acc = 0.0;
  for (size_t k = 0; k < cells; ++k)
    acc += std::abs(static_cast<double>(counts[k]) - dn * ref[k]);
  return acc / (2.0 * dn);
}

constexpr double kZeroInfoTol = 1e-9;

}  // namespace

size_t BlockMarkovCode::bin_count() const { return w_words.count(); }

uint32_t BlockMarkovCode::bin_index(size_t codeword) const {
  if (bin_of.empty()) return static_cast<uint32_t>(codeword);  // singleton bins
  return bin_of[codeword];
}

std::span<const uint32_t> BlockMarkovCode::members_of(size_t bin) const {
  if (!bin_members.empty()) return bin_members[bin];
  return {};
}

BlockMarkovRates blockmarkov_rates(const CoordinationTarget& t, const Witness& w, double margin) {
  if (w.scheme != Scheme::strictly_causal && w.scheme != Scheme::causal)
    throw std::invalid_argument("blockmarkov_rates: witness must be strictly causal or causal");
  const bool causal = w.scheme == Scheme::causal;
  const std::string w_axis = causal ? kAxisU : kAxisX;

  const JointPmf augmented = witness_joint(t, w);
  BlockMarkovRates r;
  r.i_svw = conditional_mutual_information(augmented, {kAxisS}, {kAxisV}, {w_axis});
  r.i_wy = mutual_information(augmented, {w_axis}, {kAxisY});
  r.i_vyw = conditional_mutual_information(augmented, {kAxisV}, {kAxisY}, {w_axis});
  r.slack = mutual_information(augmented, {w_axis, kAxisV}, {kAxisY}) -
            mutual_information(augmented, {w_axis, kAxisV}, {kAxisS});
  r.margin = margin < 0.0 ? std::max(0.0, std::min(r.slack / 4.0, 0.04)) : margin;
  r.singleton_bins = r.i_vyw <= kZeroInfoTol;

  const size_t card_v = causal ? w.factors.at("V|SU").to().size()
                               : w.factors.at("V|XS").to().size();
  if (card_v == 1) {
    // nothing to describe: one codeword, one bin
    r.rate_v = 0.0;
    r.rate_m = 0.0;
    r.singleton_bins = true;
    r.feasible = true;
    return r;
  }

  r.rate_v = r.i_svw + r.margin;
  if (r.singleton_bins) {
    // bin size is capped at 2^{n I(V;Y|W)} = 1, so every codeword gets its
    // own bin and the bin index carries the full description rate
    r.rate_m = r.rate_v;
  } else {
    r.rate_m = std::max(r.margin, r.rate_v - r.i_vyw + 2.0 * r.margin);
  }

  char buf[256];
  if (!(r.rate_m < r.i_wy - r.margin + 1e-15)) {
    std::snprintf(buf, sizeof(buf),
                  "bin rate R_m = %.6f must stay below I(%s;Y) - margin = %.6f",
                  r.rate_m, w_axis.c_str(), r.i_wy - r.margin);
    r.violations.push_back(buf);
  }
  if (!(r.i_svw + 3.0 * r.margin <= r.slack + r.i_svw + 1e-15)) {
    // equivalent to I(W,V;S) + 3m <= I(W,V;Y)
    std::snprintf(buf, sizeof(buf),
                  "sufficient condition fails: I(W,V;S) + 3*margin exceeds I(W,V;Y) by %.6f",
                  3.0 * r.margin - r.slack);
    r.violations.push_back(buf);
  }
  r.feasible = r.violations.empty();
  return r;
}

BlockMarkovCode build_blockmarkov(const CoordinationTarget& t, const Witness& w, size_t n,
                                  size_t B, const BlockMarkovBuildOptions& opt, Rng& rng) {
  if (B < 2) throw std::invalid_argument("build_blockmarkov: B must be >= 2");
  if (n < 1) throw std::invalid_argument("build_blockmarkov: n must be >= 1");

  BlockMarkovCode code;
  code.witness = w;
  code.causal = w.scheme == Scheme::causal;
  if (!code.causal && w.scheme != Scheme::strictly_causal)
    throw std::invalid_argument("build_blockmarkov: witness must be strictly causal or causal");
  code.n = n;
  code.B = B;

  code.rates = blockmarkov_rates(t, w, opt.margin);
  bool singleton = code.rates.singleton_bins;
  if (opt.force_rates) {
    code.rates.rate_v = opt.force_rates->rate_v;
    code.rates.rate_m = opt.force_rates->rate_m;
    code.rates.feasible = false;
    code.rates.violations.push_back("rates forced by caller");
    singleton = false;
  } else if (!code.rates.feasible) {
    std::string what = "build_blockmarkov: rate system infeasible:";
    for (const auto& v : code.rates.violations) what += "\n  " + v;
    throw RateError(what);
  }

  const size_t bits_v = rate_to_bits(n, code.rates.rate_v);
  const size_t bits_m = rate_to_bits(n, code.rates.rate_m);
  const JointPmf augmented = witness_joint(t, w);
  const std::string w_axis = code.causal ? kAxisU : kAxisX;

  code.v_words = IidCodebook(marginal_pmf(augmented, kAxisV), n, bits_v, rng.next_u64());
  code.w_words = IidCodebook(marginal_pmf(augmented, w_axis), n, bits_m, rng.next_u64());

  if (singleton || bits_v == 0) {
    // identity binning; bin_of stays empty
    if (bits_m != bits_v)
      throw std::logic_error("build_blockmarkov: singleton bins require equal rates");
  } else {
    const size_t bins = size_t{1} << bits_m;
    code.bin_of.resize(code.v_words.count());
    code.bin_members.assign(bins, {});
    for (size_t i = 0; i < code.v_words.count(); ++i) {
      const uint32_t b = static_cast<uint32_t>(rng.next_below(bins));
      code.bin_of[i] = b;
      code.bin_members[b].push_back(static_cast<uint32_t>(i));
    }
  }

  if (code.causal) code.enc_map = w.maps.at("x");
  code.dec_map = w.maps.at("shat");
  code.eps_enc = opt.eps_enc.value_or(opt.eps_policy.value(n));
  code.eps_dec = opt.eps_dec.value_or(opt.eps_policy.value(n));
  if (code.causal) {
    code.cover_joint = marginalize(augmented, {kAxisU, kAxisS, kAxisV});  // (U,S,V)
    code.wy_joint = marginalize(augmented, {kAxisU, kAxisY});
    code.vwy_joint = marginalize(augmented, {kAxisU, kAxisV, kAxisY});    // (U,V,Y)
  } else {
    code.cover_joint = marginalize(augmented, {kAxisS, kAxisX, kAxisV});  // (S,X,V)
    code.wy_joint = marginalize(augmented, {kAxisX, kAxisY});
    code.vwy_joint = marginalize(augmented, {kAxisX, kAxisV, kAxisY});    // (X,V,Y)
  }
  return code;
}

BmEncodeResult bm_encode_block(const BlockMarkovCode& code, const SequenceBlock& s_prev,
                               const SequenceBlock& w_prev, const SequenceBlock& s_cur,
                               Rng& rng) {
  const size_t n = code.n;
  if (s_prev.length() != n || w_prev.length() != n)
    throw std::invalid_argument("bm_encode_block: block length mismatch");
  const size_t nv = code.v_words.law().alphabet().size();
  const size_t nw = code.w_words.law().alphabet().size();
  const size_t ns = s_prev.alphabet.size();

  // cover_joint cells: strict (S,X,V) -> (s*nw + x)*nv + v
  //                    causal (U,S,V) -> (u*ns + s)*nv + v
  std::vector<uint32_t> base(n);
  for (size_t k = 0; k < n; ++k) {
    const size_t a = code.causal ? w_prev.symbols[k] : s_prev.symbols[k];
    const size_t b = code.causal ? s_prev.symbols[k] : w_prev.symbols[k];
    base[k] = static_cast<uint32_t>((a * (code.causal ? ns : nw) + b) * nv);
  }
  const size_t cover_cells = code.cover_joint.cell_count();
  const double* cover_ref = code.cover_joint.mass().data();

  BmEncodeResult out;
  ScanOrder order(code.v_words.bits(), rng);
  std::vector<uint8_t> scratch(n);
  for (size_t tpos = 0; tpos < code.v_words.count(); ++tpos) {
    const size_t cand = order.at(tpos);
    const uint8_t* cw = code.v_words.materialized_codeword(cand);
    if (!cw) {
      code.v_words.generate_codeword(cand, scratch);
      cw = scratch.data();
    }
    ++out.scanned;
    if (keyed_tv(cw, base.data(), 1, n, cover_cells, cover_ref) <= code.eps_enc) {
      out.codeword = cand;
      out.cover_ok = true;
      break;
    }
  }
  if (!out.cover_ok) out.codeword = rng.next_below(code.v_words.count());
  out.bin = code.bin_index(out.codeword);

  if (code.causal) {
    const SequenceBlock u = code.w_words.codeword_block(out.bin);
    const std::vector<SequenceBlock> inputs{s_cur, u};
    out.x = apply_map(*code.enc_map, inputs);
  } else {
    out.x = code.w_words.codeword_block(out.bin);
  }
  return out;
}

BmDecodeResult bm_decode_block(const BlockMarkovCode& code, const SequenceBlock& y_cur,
                               const SequenceBlock& w_prev_decoded,
                               const SequenceBlock& y_prev) {
  const size_t n = code.n;
  if (y_cur.length() != n || y_prev.length() != n || w_prev_decoded.length() != n)
    throw std::invalid_argument("bm_decode_block: block length mismatch");
  const size_t nv = code.v_words.law().alphabet().size();
  const size_t nw = code.w_words.law().alphabet().size();
  const size_t ny = y_cur.alphabet.size();
  std::vector<uint8_t> scratch(n);

  BmDecodeResult out;
  // channel stage: the unique bin codeword typical with this block's output
  {
    size_t hits = 0;
    const double* ref = code.wy_joint.mass().data();
    for (size_t m = 0; m < code.w_words.count(); ++m) {
      const uint8_t* cw = code.w_words.materialized_codeword(m);
      if (!cw) {
        code.w_words.generate_codeword(m, scratch);
        cw = scratch.data();
      }
      if (pair_tv(cw, y_cur.symbols.data(), n, nw, ny, ref) <= code.eps_dec) {
        if (++hits == 1) {
          out.bin = m;
        } else {
          out.bin_status = DecodeStatus::ambiguous;
          break;
        }
      }
    }
    if (out.bin_status != DecodeStatus::ambiguous)
      out.bin_status = hits == 1 ? DecodeStatus::ok : DecodeStatus::none_typical;
    if (out.bin_status == DecodeStatus::none_typical) out.bin = 0;
    if (code.w_words.count() == 1) {
      out.bin_status = DecodeStatus::ok;
      out.bin = 0;
    }
  }

  // in-bin stage with the previous block's (W, Y) pair as side information;
  // vwy_joint cells: (w*nv + v)*ny + y, the codeword sits in the middle
  std::vector<uint32_t> base(n);
  for (size_t k = 0; k < n; ++k)
    base[k] = static_cast<uint32_t>(w_prev_decoded.symbols[k] * nv * ny + y_prev.symbols[k]);
  const double* vwy_ref = code.vwy_joint.mass().data();
  const size_t vwy_cells = code.vwy_joint.cell_count();

  if (code.bin_of.empty()) {
    // singleton bins: the bin index names the codeword; still insist the
    // candidate is typical with the side information
    out.codeword = out.bin;
    const uint8_t* cw = code.v_words.materialized_codeword(out.codeword);
    if (!cw) {
      code.v_words.generate_codeword(out.codeword, scratch);
      cw = scratch.data();
    }
    const bool typ = keyed_tv(cw, base.data(), ny, n, vwy_cells, vwy_ref) <= code.eps_dec;
    out.v_status = typ ? DecodeStatus::ok : DecodeStatus::none_typical;
  } else {
    auto members = code.members_of(out.bin);
    size_t hits = 0;
    size_t first = members.empty() ? 0 : members[0];
    DecodeStatus st = DecodeStatus::none_typical;
    for (uint32_t cand : members) {
      const uint8_t* cw = code.v_words.materialized_codeword(cand);
      if (!cw) {
        code.v_words.generate_codeword(cand, scratch);
        cw = scratch.data();
      }
      if (keyed_tv(cw, base.data(), ny, n, vwy_cells, vwy_ref) <= code.eps_dec) {
        if (++hits == 1) {
          first = cand;
        } else {
          st = DecodeStatus::ambiguous;
          break;
        }
      }
    }
    if (st != DecodeStatus::ambiguous)
      st = hits == 1 ? DecodeStatus::ok : DecodeStatus::none_typical;
    out.v_status = st;
    out.codeword = first;
  }

  // reconstruction of the previous block, symbol by symbol
  const SequenceBlock v_hat = code.v_words.codeword_block(out.codeword);
  if (code.causal) {
    const std::vector<SequenceBlock> inputs{w_prev_decoded, v_hat, y_prev};
    out.shat = apply_map(code.dec_map, inputs);
  } else {
    const std::vector<SequenceBlock> inputs{v_hat, y_prev};
    out.shat = apply_map(code.dec_map, inputs);
  }
  return out;
}

ChainResult run_chain(const BlockMarkovCode& code, const CoordinationTarget& target, Rng& rng,
                      std::span<const SequenceBlock> sources) {
  const size_t n = code.n;
  const size_t B = code.B;
  ChainResult chain;
  chain.n = n;
  chain.B = B;
  chain.seed = rng.seed();
  if (!sources.empty() && sources.size() != B)
    throw std::invalid_argument("run_chain: source override must supply one block per chain block");

  // separate streams per role and block index: the channel input of block j
  // must not be disturbed by randomness consumed for later sources
  auto source_block = [&](size_t i) {
    if (!sources.empty()) return sources[i - 1];
    Rng r = rng.derive("source", i);
    return sample_iid(target.source, n, r);
  };

  auto w_block = [&](size_t m) { return code.w_words.codeword_block(m); };

  std::vector<SequenceBlock> s(B + 1), x(B + 1), y(B + 1);
  std::vector<size_t> m_sent(B + 1, 0), l_sent(B + 1, 0);
  std::vector<bool> covered(B + 1, false);

  // encoder pass; block 1 carries the fixed index-0 codeword
  for (size_t i = 1; i <= B; ++i) {
    s[i] = source_block(i);
    if (i == 1) {
      m_sent[1] = 0;
      if (code.causal) {
        const SequenceBlock u = w_block(0);
        const std::vector<SequenceBlock> inputs{s[1], u};
        x[1] = apply_map(*code.enc_map, inputs);
      } else {
        x[1] = w_block(0);
      }
    } else {
      Rng enc_rng = rng.derive("encode", i);
      const SequenceBlock w_prev =
          code.causal ? w_block(m_sent[i - 1]) : x[i - 1];
      const BmEncodeResult enc = bm_encode_block(code, s[i - 1], w_prev, s[i], enc_rng);
      covered[i] = enc.cover_ok;
      l_sent[i] = enc.codeword;
      m_sent[i] = enc.bin;
      x[i] = enc.x;
    }
    Rng ch_rng = rng.derive("channel", i);
    const std::vector<SequenceBlock> chan_in{x[i]};
    y[i] = sample_through(target.channel, chan_in, ch_rng);
  }

  // decoder pass; m_hat[1] = 0 is granted as common knowledge
  std::vector<size_t> m_hat(B + 1, 0);
  std::vector<size_t> l_hat_all(B + 1, 0);
  chain.per_block.reserve(B - 1);
  for (size_t i = 2; i <= B; ++i) {
    const BmDecodeResult dec = bm_decode_block(code, y[i], w_block(m_hat[i - 1]), y[i - 1]);
    m_hat[i] = dec.bin;
    l_hat_all[i] = dec.codeword;

    BlockResult res;
    res.cover_ok = covered[i];
    res.bin_status = dec.bin_status;
    res.bin_decode_ok = dec.bin_status == DecodeStatus::ok;
    res.v_status = dec.v_status;
    res.v_decode_ok = dec.v_status == DecodeStatus::ok;
    res.indices_correct = m_hat[i] == m_sent[i] && dec.codeword == l_sent[i] &&
                          m_hat[i - 1] == m_sent[i - 1];
    const std::vector<SequenceBlock> tuple{s[i - 1], x[i - 1], y[i - 1], dec.shat};
    res.tv_distance = empirical_tv(tuple, target.joint);
    chain.per_block.push_back(res);
    chain.shat_blocks.push_back(dec.shat);
  }

  chain.s_blocks.assign(s.begin() + 1, s.end());
  chain.x_blocks.assign(x.begin() + 1, x.end());
  chain.y_blocks.assign(y.begin() + 1, y.end());
  chain.sent_bins.assign(m_sent.begin() + 1, m_sent.end());
  chain.sent_codewords.assign(l_sent.begin() + 1, l_sent.end());
  chain.decoded_bins.assign(m_hat.begin() + 1, m_hat.end());
  chain.decoded_codewords.assign(l_hat_all.begin() + 1, l_hat_all.end());
  return chain;
}

}  // namespace coordlab
