#include <doctest.h>

#include <stdexcept>

#include "coordlab/hybrid.hpp"
#include "test_util.hpp"

using namespace coordlab;
using testutil::close;
using testutil::h2;

namespace {

HybridCode build_low_rate(const CoordinationTarget& t, const Witness& w, size_t n,
                          uint64_t seed, double margin = 0.004) {
  HybridBuildOptions opt;
  opt.rate_margin = margin;
  Rng rng(stable_hash(seed, "codebook", n));
  return build_hybrid(t, w, n, opt, rng);
}

}  // namespace

TEST_CASE("epsilon schedule") {
  const EpsilonPolicy sched = EpsilonPolicy::schedule();
  CHECK(sched.value(100) == 0.3);  // 2 * 100^{-1/3} clamps at the ceiling
  CHECK(close(sched.value(900), 2.0 * std::pow(900.0, -1.0 / 3.0), 1e-12));
  CHECK(sched.value(2000000) == 0.02);  // floor
  CHECK(EpsilonPolicy::fixed(0.12).value(77) == 0.12);
}

TEST_CASE("hybrid build: rates, table sizes, and guards") {
  auto [t, w] = make_binary_example(0.4, 0.1, 0.2);

  // ceil(60 * (I(U;S) + 0.05)) = 18 bits
  HybridBuildOptions opt;
  opt.rate_margin = 0.05;
  Rng rng(1);
  HybridCode code = build_hybrid(t, w, 60, opt, rng);
  CHECK(close(code.rate, h2(0.4) - h2(0.2) + 0.05, 1e-12));
  CHECK(code.codewords.bits() == 18);
  CHECK(code.codewords.count() == 262144);

  // n = 100 at the same margin wants 2^30 codewords: over the guard
  Rng rng2(2);
  CHECK_THROWS_AS(build_hybrid(t, w, 100, opt, rng2), CodebookLimitError);

  // margin too large for the witness slack
  HybridBuildOptions tight;
  tight.rate_margin = 0.2;  // slack is 0.2301 < 2 * 0.2
  Rng rng3(3);
  CHECK_THROWS_AS(build_hybrid(t, w, 60, tight, rng3), RateError);

  // degenerate witness: single repeated codeword
  auto [td, wd] = make_binary_example(0.2, 0.0, 0.2);  // q = 0, U constant-ish
  Witness degenerate = wd;
  const Alphabet u1 = Alphabet::indexed(kAxisU, 1);
  degenerate.aux_alphabets = {u1};
  degenerate.factors.clear();
  degenerate.factors.emplace("U|S", ConditionalPmf({t.joint.axes()[0]}, u1, {{1.0}, {1.0}}));
  degenerate.maps.clear();
  // x(s,u) = s, shat(u,y) = y reproduces S = X = Y = Shat targets
  degenerate.maps.emplace("x", SymbolMap::project({t.joint.axes()[0], u1}, t.joint.axes()[1], 0));
  degenerate.maps.emplace("shat", SymbolMap::project({u1, t.joint.axes()[2]}, t.joint.axes()[3], 1));
  const Pmf src = Pmf::bernoulli(Alphabet::binary(kAxisS), 0.3);
  const ConditionalPmf noiseless = ConditionalPmf::bsc(Alphabet::binary(kAxisX),
                                                       Alphabet::binary(kAxisY), 0.0);
  const JointPmf diag = compose({
      factor(kAxisS, src),
      factor(kAxisX, {kAxisS}, ConditionalPmf::identity(Alphabet::binary(kAxisS),
                                                        Alphabet::binary(kAxisX))),
      factor(kAxisY, {kAxisX}, noiseless),
      factor(kAxisShat, {kAxisY}, ConditionalPmf::identity(Alphabet::binary(kAxisY),
                                                           Alphabet::binary(kAxisShat))),
  });
  const CoordinationTarget ident{src, noiseless, diag};
  REQUIRE(verify_witness(ident, degenerate).valid);
  Rng rng4(4);
  HybridCode dcode = build_hybrid(ident, degenerate, 50, HybridBuildOptions{}, rng4);
  CHECK(dcode.codewords.count() == 1);
  CHECK(dcode.rate == 0.0);

  Rng trng(99);
  const TrialResult tr = run_hybrid_trial(dcode, ident, trng);
  CHECK(tr.decode_ok);
  CHECK(tr.decoded_index_correct);
}

TEST_CASE("hybrid determinism: same witness, n, seed yield identical results") {
  auto [t, w] = make_binary_example(0.5, 0.1, 0.44);
  HybridCode a = build_low_rate(t, w, 300, 777);
  HybridCode b = build_low_rate(t, w, 300, 777);
  for (size_t i : {size_t{0}, size_t{7}, a.codewords.count() - 1})
    CHECK(a.codewords.codeword_block(i).symbols == b.codewords.codeword_block(i).symbols);
  Rng ra(12345), rb(12345);
  const TrialResult x = run_hybrid_trial(a, t, ra);
  const TrialResult y = run_hybrid_trial(b, t, rb);
  CHECK(x.tv_distance == y.tv_distance);
  CHECK(x.encode_ok == y.encode_ok);
  CHECK(x.decoded_index_correct == y.decoded_index_correct);
}

TEST_CASE("hybrid covering: the encoder genuinely searches and succeeds") {
  auto [t, w] = make_binary_example(0.4, 0.1, 0.2);
  HybridBuildOptions opt;
  opt.rate_margin = 0.02;
  opt.eps_enc = 0.15;
  opt.eps_dec = 0.15;
  Rng rng(stable_hash(31, "codebook", 60));
  HybridCode code = build_hybrid(t, w, 60, opt, rng);
  int encode_ok = 0;
  double total_scanned = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    Rng trng(stable_hash(31, "cover", 60, trial));
    const SequenceBlock s = sample_iid(t.source, 60, trng);
    const HybridEncodeResult enc = hybrid_encode(code, s, trng);
    encode_ok += enc.encode_ok;
    total_scanned += static_cast<double>(enc.scanned);
  }
  CHECK(encode_ok >= 190);             // covering succeeds (pilot-frozen threshold)
  CHECK(total_scanned / 200.0 > 10.0); // and the codebook is genuinely scanned
}

TEST_CASE("hybrid encode/decode success rates at desk scale") {
  auto [t, w] = make_binary_example(0.5, 0.1, 0.44);
  HybridCode code = build_low_rate(t, w, 600, 42);
  int enc = 0, dec = 0, idx = 0;
  for (int trial = 0; trial < 200; ++trial) {
    Rng rng(stable_hash(42, "trial", 600, trial));
    const TrialResult r = run_hybrid_trial(code, t, rng);
    enc += r.encode_ok;
    dec += r.decode_ok;
    idx += r.decoded_index_correct;
  }
  CHECK(enc >= 198);  // >= 0.99
  CHECK(dec >= 190);  // >= 0.95
  CHECK(idx >= 190);
}

TEST_CASE("hybrid trivial typicality thresholds") {
  auto [t, w] = make_binary_example(0.5, 0.1, 0.44);
  HybridBuildOptions opt;
  opt.rate_margin = 0.004;
  opt.eps_enc = 1.0;  // TV never exceeds 1: first scanned codeword wins
  Rng rng(5);
  HybridCode code = build_hybrid(t, w, 100, opt, rng);
  Rng trng(6);
  const SequenceBlock s = sample_iid(t.source, 100, trng);
  const HybridEncodeResult enc = hybrid_encode(code, s, trng);
  CHECK(enc.encode_ok);
  CHECK(enc.scanned == 1);

  // eps_dec = 0 demands an exact empirical match, which essentially never
  // happens with a continuous-valued target
  HybridBuildOptions opt0;
  opt0.rate_margin = 0.004;
  opt0.eps_dec = 0.0;
  Rng rng2(7);
  HybridCode code0 = build_hybrid(t, w, 100, opt0, rng2);
  Rng trng2(8);
  const SequenceBlock s2 = sample_iid(t.source, 100, trng2);
  const HybridEncodeResult enc2 = hybrid_encode(code0, s2, trng2);
  const std::vector<SequenceBlock> chan_in{enc2.x};
  const SequenceBlock y = sample_through(t.channel, chan_in, trng2);
  const HybridDecodeResult dec = hybrid_decode(code0, y);
  CHECK(dec.status == DecodeStatus::none_typical);
}

TEST_CASE("hybrid convergence trend across n") {
  auto [t, w] = make_binary_example(0.5, 0.1, 0.44);
  std::vector<double> medians;
  for (size_t n : {size_t{100}, size_t{300}, size_t{900}}) {
    HybridCode code = build_low_rate(t, w, n, 4242);
    std::vector<double> tvs;
    for (int trial = 0; trial < 100; ++trial) {
      Rng rng(stable_hash(4242, "hybrid", n, trial));
      tvs.push_back(run_hybrid_trial(code, t, rng).tv_distance);
    }
    std::sort(tvs.begin(), tvs.end());
    medians.push_back(0.5 * (tvs[49] + tvs[50]));
  }
  CHECK(medians[1] < medians[0]);
  CHECK(medians[2] < medians[1]);
}

TEST_CASE("channel-input law matches the witness marginal") {
  auto [t, w] = make_binary_example(0.5, 0.1, 0.44);
  HybridCode code = build_low_rate(t, w, 600, 31);
  size_t ones = 0, total = 0;
  for (int trial = 0; trial < 200; ++trial) {
    Rng rng(stable_hash(31, "law", 600, trial));
    const SequenceBlock s = sample_iid(t.source, 600, rng);
    const HybridEncodeResult enc = hybrid_encode(code, s, rng);
    for (uint8_t sym : enc.x.symbols) ones += sym;
    total += enc.x.symbols.size();
  }
  const double expected = marginal_pmf(t.joint, kAxisX)[1];
  CHECK(std::abs(static_cast<double>(ones) / static_cast<double>(total) - expected) < 0.05);
}

TEST_CASE("correct decoding coincides with the omniscient decoder") {
  auto [t, w] = make_binary_example(0.5, 0.1, 0.44);
  HybridCode code = build_low_rate(t, w, 300, 88);
  for (int trial = 0; trial < 50; ++trial) {
    Rng rng(stable_hash(88, "omni", 300, trial));
    const SequenceBlock s = sample_iid(t.source, 300, rng);
    const HybridEncodeResult enc = hybrid_encode(code, s, rng);
    const std::vector<SequenceBlock> chan_in{enc.x};
    const SequenceBlock y = sample_through(t.channel, chan_in, rng);
    const HybridDecodeResult dec = hybrid_decode(code, y);
    if (!(dec.status == DecodeStatus::ok && dec.index == enc.index)) continue;
    // omniscient reconstruction from the true index
    const SequenceBlock u = code.codewords.codeword_block(enc.index);
    const std::vector<SequenceBlock> inputs{u, y};
    const SequenceBlock omniscient = apply_map(code.dec_map, inputs);
    CHECK(dec.shat.symbols == omniscient.symbols);
  }
}

TEST_CASE("packing failure: rate above I(U;Y) breeds ambiguity as n grows") {
  auto [t, w] = make_binary_example(0.5, 0.42, 0.45);  // I(U;Y) = 0.0186
  HybridBuildOptions opt;
  opt.rate_override = 0.025;  // deliberately above I(U;Y)
  opt.eps_enc = 0.1;
  opt.eps_dec = 0.1;
  std::vector<int> ambiguous;
  for (size_t n : {size_t{30}, size_t{150}}) {
    Rng rng(stable_hash(17, "codebook", n));
    HybridCode code = build_hybrid(t, w, n, opt, rng);
    int amb = 0;
    for (int trial = 0; trial < 60; ++trial) {
      Rng trng(stable_hash(17, "pack", n, trial));
      const SequenceBlock s = sample_iid(t.source, n, trng);
      const HybridEncodeResult enc = hybrid_encode(code, s, trng);
      const std::vector<SequenceBlock> chan_in{enc.x};
      const SequenceBlock y = sample_through(t.channel, chan_in, trng);
      amb += hybrid_decode(code, y).status == DecodeStatus::ambiguous;
    }
    ambiguous.push_back(amb);
  }
  CHECK(ambiguous[1] > ambiguous[0]);
}

TEST_CASE("hybrid against the wrong target keeps its distance") {
  auto [ta, wa] = make_binary_example(0.5, 0.1, 0.44);
  auto [tb, wb] = make_binary_example(0.5, 0.1, 0.25);
  const double gap = total_variation(ta.joint, tb.joint);
  REQUIRE(gap > 0.15);
  HybridCode code = build_low_rate(ta, wa, 900, 29);
  for (int trial = 0; trial < 25; ++trial) {
    Rng rng(stable_hash(29, "adv", 900, trial));
    const TrialResult r = run_hybrid_trial(code, tb, rng);
    CHECK(r.tv_distance >= gap - 0.1);
  }
}

TEST_CASE("separation codec: build preconditions") {
  // not a separation member
  auto [ht, hw] = make_binary_example(0.4, 0.1, 0.2);
  Rng rng(1);
  CHECK_THROWS_AS(build_separation(ht, 100, SeparationBuildOptions{}, rng), RateError);

  // member with I(S;Shat) = 0: a single repeated source codeword
  const Pmf src = Pmf::bernoulli(Alphabet::binary(kAxisS), 0.5);
  const ConditionalPmf ch = ConditionalPmf::bsc(Alphabet::binary(kAxisX),
                                                Alphabet::binary(kAxisY), 0.05);
  const JointPmf indep = compose({
      factor(kAxisS, src),
      factor(kAxisX, Pmf::bernoulli(Alphabet::binary(kAxisX), 0.5)),
      factor(kAxisY, {kAxisX}, ch),
      factor(kAxisShat, Pmf::bernoulli(Alphabet::binary(kAxisShat), 0.25)),
  });
  Rng rng2(2);
  SeparationCode code = build_separation({src, ch, indep}, 200, SeparationBuildOptions{}, rng2);
  CHECK(code.source_words.count() == 1);
  Rng trng(3);
  const TrialResult r = run_separation_trial(code, {src, ch, indep}, trng);
  CHECK(r.decode_ok);
  CHECK(r.decoded_index_correct);
}

TEST_CASE("separation codec converges on a separation member") {
  const Pmf src = Pmf::bernoulli(Alphabet::binary(kAxisS), 0.5);
  const ConditionalPmf ch = ConditionalPmf::bsc(Alphabet::binary(kAxisX),
                                                Alphabet::binary(kAxisY), 0.05);
  const JointPmf joint = compose({
      factor(kAxisS, src),
      factor(kAxisX, Pmf::bernoulli(Alphabet::binary(kAxisX), 0.5)),
      factor(kAxisY, {kAxisX}, ch),
      factor(kAxisShat, {kAxisS},
             ConditionalPmf::bsc(Alphabet::binary(kAxisS), Alphabet::binary(kAxisShat), 0.45)),
  });
  const CoordinationTarget t{src, ch, joint};
  SeparationBuildOptions opt;
  opt.source_margin = 0.004;
  opt.channel_margin = 0.004;
  std::vector<double> medians;
  for (size_t n : {size_t{200}, size_t{600}}) {
    Rng rng(stable_hash(19, "codebook", n));
    SeparationCode code = build_separation(t, n, opt, rng);
    std::vector<double> tvs;
    int dec = 0;
    for (int trial = 0; trial < 100; ++trial) {
      Rng trng(stable_hash(19, "sep", n, trial));
      const TrialResult r = run_separation_trial(code, t, trng);
      tvs.push_back(r.tv_distance);
      dec += r.decode_ok;
    }
    CHECK(dec >= 95);
    std::sort(tvs.begin(), tvs.end());
    medians.push_back(0.5 * (tvs[49] + tvs[50]));
  }
  CHECK(medians[1] < medians[0]);
}

TEST_CASE("separation cannot reach the hybrid example's correlation") {
  auto [ht, hw] = make_binary_example(0.4, 0.1, 0.2);
  // the closest separation-feasible surrogate: product of the two marginal
  // pairs, which keeps P_S, the channel, and P_{Shat|S}
  const JointPmf surrogate = compose({
      factor(kAxisS, ht.source),
      factor(kAxisX, marginal_pmf(ht.joint, kAxisX)),
      factor(kAxisY, {kAxisX}, ht.channel),
      factor(kAxisShat, {kAxisS}, conditional_of(ht.joint, kAxisShat, {kAxisS})),
  });
  const CoordinationTarget sep_t{ht.source, ht.channel, surrogate};
  REQUIRE(check_separation(sep_t).status == MembershipStatus::member_with_witness);
  const double residual = total_variation(surrogate, ht.joint);
  REQUIRE(residual > 0.3);

  SeparationBuildOptions opt;
  opt.source_margin = 0.01;
  opt.channel_margin = 0.01;
  Rng rng(stable_hash(23, "codebook", 60));
  SeparationCode code = build_separation(sep_t, 60, opt, rng);
  for (int trial = 0; trial < 25; ++trial) {
    Rng trng(stable_hash(23, "cross", 60, trial));
    const TrialResult r = run_separation_trial(code, ht, trng);
    CHECK(r.tv_distance >= residual - 0.15);
  }
}
