#include <doctest.h>

#include <stdexcept>

#include "coordlab/region.hpp"
#include "test_util.hpp"

using namespace coordlab;
using testutil::close;
using testutil::h2;

namespace {

Alphabet bit(const std::string& name) { return Alphabet::binary(name); }

SearchConfig quick_search(uint64_t seed, int starts = 8) {
  SearchConfig cfg;
  cfg.starts = starts;
  cfg.seed = seed;
  cfg.threads = 4;
  return cfg;
}

// random target in the separation set: independent (S,Shat) and (X,Y) legs
CoordinationTarget random_separation_target(Rng& rng) {
  const double p_s = 0.2 + 0.6 * rng.next_unit();
  const double noise = 0.3 + 0.19 * rng.next_unit();   // weak I(S;Shat)
  const double ch_eps = 0.02 + 0.05 * rng.next_unit(); // strong channel
  const double p_x = 0.35 + 0.3 * rng.next_unit();
  const Pmf source = Pmf::bernoulli(bit(kAxisS), p_s);
  const ConditionalPmf channel = ConditionalPmf::bsc(bit(kAxisX), bit(kAxisY), ch_eps);
  const JointPmf joint = compose({
      factor(kAxisS, source),
      factor(kAxisX, Pmf::bernoulli(bit(kAxisX), p_x)),
      factor(kAxisY, {kAxisX}, channel),
      factor(kAxisShat, {kAxisS}, ConditionalPmf::bsc(bit(kAxisS), bit(kAxisShat), noise)),
  });
  return CoordinationTarget{source, channel, joint};
}

}  // namespace

TEST_CASE("validate_target accepts composed targets and rejects broken ones") {
  auto [target, witness] = make_binary_example(0.4, 0.1, 0.2);
  CHECK(validate_target(target).ok);

  // force Y to depend on S given X: replace the channel leg by a map that
  // reads S directly
  const JointPmf bad = compose({
      factor(kAxisS, target.source),
      factor(kAxisX, {kAxisS}, ConditionalPmf::bsc(bit(kAxisS), bit(kAxisX), 0.2)),
      factor(kAxisY, {kAxisS}, ConditionalPmf::bsc(bit(kAxisS), bit(kAxisY), 0.1)),
      factor(kAxisShat, {kAxisX}, ConditionalPmf::identity(bit(kAxisX), bit(kAxisShat))),
  });
  const CoordinationTarget broken{target.source, target.channel, bad};
  const TargetValidation v = validate_target(broken);
  CHECK(!v.ok);
  CHECK(v.channel_residual > 1e-6);

  const MembershipVerdict verdict = check_noncausal_inner(broken, 2, quick_search(1));
  CHECK(verdict.status == MembershipStatus::infeasible_factorization);
}

TEST_CASE("binary example: closed-form information values") {
  auto [target, witness] = make_binary_example(0.4, 0.1, 0.2);
  const JointPmf aug = witness_joint(target, witness);
  auto [i_us, i_uy] = witness_constraint(aug, Scheme::noncausal);

  // oracle: I(U;S) = H(p) - H(d), I(U;Y) = H(q*eps) - H(eps), q = 1/3
  const double q = 1.0 / 3.0;
  const double qe = q * 0.9 + (1.0 - q) * 0.1;
  CHECK(close(i_us, h2(0.4) - h2(0.2), 1e-9));
  CHECK(close(i_uy, h2(qe) - h2(0.1), 1e-9));
  CHECK(close(witness.slack_bits, (h2(qe) - h2(0.1)) - (h2(0.4) - h2(0.2)), 1e-9));
  CHECK(close(witness.slack_bits, 0.2301, 5e-5));

  const CertificateCheck check = verify_witness(target, witness);
  CHECK(check.valid);
  CHECK(check.marginal_tv < 1e-12);

  // P[S != Shat] = P[S != X] = d by construction
  double mismatch_sx = 0.0, mismatch_ssh = 0.0;
  const auto& j = target.joint;
  for (size_t s = 0; s < 2; ++s)
    for (size_t x = 0; x < 2; ++x)
      for (size_t y = 0; y < 2; ++y)
        for (size_t h = 0; h < 2; ++h) {
          const double w = j.prob(std::vector<size_t>{s, x, y, h});
          if (s != x) mismatch_sx += w;
          if (s != h) mismatch_ssh += w;
        }
  CHECK(close(mismatch_sx, 0.2, 1e-12));
  CHECK(close(mismatch_ssh, 0.2, 1e-12));
}

TEST_CASE("binary example: boundary and precondition cases") {
  // d = eps forces equality of the constraint chain for any valid p
  for (double p : {0.1, 0.25, 0.4, 0.5}) {
    auto [target, witness] = make_binary_example(p, 0.1, 0.1);
    CHECK(std::abs(witness.slack_bits) <= 1e-9);
  }
  // d > eps gives strictly positive slack
  for (double p : {0.3, 0.4, 0.5}) {
    auto [target, witness] = make_binary_example(p, 0.05, 0.2);
    CHECK(witness.slack_bits > 1e-6);
  }
  CHECK_THROWS_AS(make_binary_example(0.5, 0.2, 0.1), std::invalid_argument);  // eps > d
  CHECK_THROWS_AS(make_binary_example(0.2, 0.1, 0.3), std::invalid_argument);  // d > p
  CHECK_THROWS_AS(make_binary_example(0.6, 0.1, 0.2), std::invalid_argument);  // p > 1/2
}

TEST_CASE("binary example witness is certified across the parameter grid") {
  for (int ip = 1; ip <= 10; ++ip) {
    const double p = 0.5 * ip / 10.0;
    for (int id = 1; id <= 10; ++id) {
      const double d = std::min(p * id / 10.0, 0.49);
      for (int ie = 0; ie < 10; ++ie) {
        const double eps = d * ie / 10.0;
        auto [target, witness] = make_binary_example(p, eps, d);
        const CertificateCheck check = verify_witness(target, witness);
        CHECK(check.valid);
        CHECK(check.slack_bits >= -1e-9);
      }
    }
  }
}

TEST_CASE("check_separation on canonical targets") {
  // the binary-example target correlates X with S, so the product
  // factorization fails
  auto [hybrid_target, hw] = make_binary_example(0.4, 0.1, 0.2);
  const MembershipVerdict a = check_separation(hybrid_target);
  CHECK(a.status == MembershipStatus::not_found);
  CHECK(a.log.best_residual > 0.01);

  // classic separation instance
  Rng rng(11);
  const Pmf source = Pmf::bernoulli(bit(kAxisS), 0.5);
  const ConditionalPmf channel = ConditionalPmf::bsc(bit(kAxisX), bit(kAxisY), 0.05);
  const JointPmf joint = compose({
      factor(kAxisS, source),
      factor(kAxisX, Pmf::bernoulli(bit(kAxisX), 0.5)),
      factor(kAxisY, {kAxisX}, channel),
      factor(kAxisShat, {kAxisS}, ConditionalPmf::bsc(bit(kAxisS), bit(kAxisShat), 0.2)),
  });
  const CoordinationTarget sep_target{source, channel, joint};
  const MembershipVerdict b = check_separation(sep_target);
  REQUIRE(b.status == MembershipStatus::member_with_witness);
  CHECK(close(mutual_information(joint, {kAxisS}, {kAxisShat}), 1.0 - h2(0.2), 1e-9));
  CHECK(close(mutual_information(joint, {kAxisX}, {kAxisY}), 1.0 - h2(0.05), 1e-9));
  CHECK(close(b.witness->slack_bits, (1.0 - h2(0.05)) - (1.0 - h2(0.2)), 1e-9));
  CHECK(verify_witness(sep_target, *b.witness, 1e-9, 1e-9).valid);

  // verdicts are a deterministic function of the target
  const MembershipVerdict b2 = check_separation(sep_target);
  CHECK(b2.status == b.status);
  CHECK(b2.log.best_residual == b.log.best_residual);
  CHECK(b2.witness->slack_bits == b.witness->slack_bits);

  // independent Shat with I(S;Shat) = 0 is always a member once the joint
  // is a product
  const JointPmf joint0 = compose({
      factor(kAxisS, source),
      factor(kAxisX, Pmf::bernoulli(bit(kAxisX), 0.5)),
      factor(kAxisY, {kAxisX}, channel),
      factor(kAxisShat, Pmf::bernoulli(bit(kAxisShat), 0.3)),
  });
  const MembershipVerdict c = check_separation({source, channel, joint0});
  CHECK(c.status == MembershipStatus::member_with_witness);
}

TEST_CASE("noncausal search finds the binary-example witness") {
  auto [target, witness] = make_binary_example(0.4, 0.1, 0.2);
  const MembershipVerdict v = check_noncausal_inner(target, 2, quick_search(21, 8));
  REQUIRE(v.status == MembershipStatus::member_with_witness);
  CHECK(close(v.witness->slack_bits, 0.23006, 1e-3));
  CHECK(verify_witness(target, *v.witness).valid);
}

TEST_CASE("noncausal search covers the empty-coordination target") {
  // everything independent and uniform; U must absorb both the channel-input
  // coin and the reconstruction coin
  const Pmf source = Pmf::bernoulli(bit(kAxisS), 0.5);
  const ConditionalPmf channel = ConditionalPmf::bsc(bit(kAxisX), bit(kAxisY), 0.1);
  const JointPmf joint = compose({
      factor(kAxisS, source),
      factor(kAxisX, Pmf::bernoulli(bit(kAxisX), 0.5)),
      factor(kAxisY, {kAxisX}, channel),
      factor(kAxisShat, Pmf::bernoulli(bit(kAxisShat), 0.5)),
  });
  const CoordinationTarget t{source, channel, joint};
  SearchConfig cfg = quick_search(33, 16);
  cfg.map_samples = 16;
  const MembershipVerdict v = check_noncausal_inner(t, 4, cfg);
  REQUIRE(v.status == MembershipStatus::member_with_witness);
  CHECK(verify_witness(t, *v.witness).valid);
  CHECK(close(verify_witness(t, *v.witness).lhs_bits, 0.0, 1e-6));
}

TEST_CASE("separation members lift into the noncausal inner set") {
  Rng rng(5005);
  int checked = 0;
  while (checked < 50) {
    const CoordinationTarget t = random_separation_target(rng);
    const MembershipVerdict sep = check_separation(t);
    if (sep.status != MembershipStatus::member_with_witness) continue;
    ++checked;
    const Witness lifted = separation_to_noncausal(t, *sep.witness);
    const CertificateCheck check = verify_witness(t, lifted);
    CHECK(check.valid);
    CHECK(check.slack_bits >= -1e-9);
  }
  // and the search confirms membership when seeded with the lifted witness
  const CoordinationTarget t = random_separation_target(rng);
  const MembershipVerdict sep = check_separation(t);
  REQUIRE(sep.status == MembershipStatus::member_with_witness);
  SearchConfig cfg = quick_search(44, 4);
  cfg.hint = separation_to_noncausal(t, *sep.witness);
  const MembershipVerdict v = check_noncausal_inner(t, 4, cfg);
  CHECK(v.status == MembershipStatus::member_with_witness);
}

TEST_CASE("causal region: identity channel with lossless reproduction") {
  // Shat = X = S over a noiseless channel; the constraint holds with
  // equality: I(U,V;S) = H(S) = I(U,V;Y)
  const Pmf source = Pmf::bernoulli(bit(kAxisS), 0.1);
  const ConditionalPmf channel = ConditionalPmf::bsc(bit(kAxisX), bit(kAxisY), 0.0);
  const JointPmf joint = compose({
      factor(kAxisS, source),
      factor(kAxisX, {kAxisS}, ConditionalPmf::identity(bit(kAxisS), bit(kAxisX))),
      factor(kAxisY, {kAxisX}, channel),
      factor(kAxisShat, {kAxisS}, ConditionalPmf::identity(bit(kAxisS), bit(kAxisShat))),
  });
  const CoordinationTarget t{source, channel, joint};

  Witness hand;
  hand.scheme = Scheme::causal;
  const Alphabet u1 = Alphabet::indexed(kAxisU, 1);
  const Alphabet v2 = bit(kAxisV);
  hand.aux_alphabets = {u1, v2};
  hand.factors.emplace("U", ConditionalPmf({}, u1, {{1.0}}));
  hand.factors.emplace("V|SU",
                       ConditionalPmf({bit(kAxisS), u1}, v2, {{1.0, 0.0}, {0.0, 1.0}}));
  hand.maps.emplace("x", SymbolMap::project({bit(kAxisS), u1}, bit(kAxisX), 0));
  // shat(u,v,y) = v
  hand.maps.emplace("shat", SymbolMap::project({u1, v2, bit(kAxisY)}, bit(kAxisShat), 1));
  const CertificateCheck check = verify_witness(t, hand);
  CHECK(check.valid);
  CHECK(close(check.lhs_bits, h2(0.1), 1e-9));
  CHECK(close(check.rhs_bits, h2(0.1), 1e-9));

  SearchConfig cfg = quick_search(55, 4);
  cfg.hint = hand;
  const MembershipVerdict v = check_causal(t, 1, 2, cfg);
  CHECK(v.status == MembershipStatus::member_with_witness);
}

TEST_CASE("strictly causal region: state reproduction") {
  auto [t, w] = make_lossless_state(0.1, 0.05);
  const CertificateCheck check = verify_witness(t, w);
  CHECK(check.valid);
  CHECK(close(check.lhs_bits, h2(0.1), 1e-9));          // I(X,V;S) = H(S)
  CHECK(close(check.rhs_bits, 1.0 - h2(0.05), 1e-9));   // I(X,V;Y) = I(X;Y)
  CHECK(close(check.lhs_bits, 0.4690, 1e-4));
  CHECK(close(check.rhs_bits, 0.7136, 1e-4));

  SearchConfig cfg = quick_search(66, 4);
  cfg.hint = w;
  const MembershipVerdict v = check_strictly_causal(t, 2, cfg);
  CHECK(v.status == MembershipStatus::member_with_witness);

  // a strictly causal member is a causal member via the lifting
  const Witness lifted = strict_to_causal(w);
  CHECK(verify_witness(t, lifted).valid);
  SearchConfig ccfg = quick_search(67, 2);
  ccfg.hint = lifted;
  const MembershipVerdict cv = check_causal(t, 2, 2, ccfg);
  CHECK(cv.status == MembershipStatus::member_with_witness);
}

TEST_CASE("strictly causal region: fair source exceeds the channel") {
  // H(S) = 1 > I(X;Y) = 1 - H(0.05): lossless reproduction is impossible
  auto [t, w] = make_lossless_state(0.5, 0.05);
  CHECK(verify_witness(t, w).slack_bits < 0.0);
  for (size_t card_v : {1, 2, 3}) {
    const MembershipVerdict v = check_strictly_causal(t, card_v, quick_search(68, 8));
    CHECK(v.status == MembershipStatus::not_found);
  }
}

TEST_CASE("strictly causal region: correlated channel input is diagnosed") {
  const Pmf source = Pmf::bernoulli(bit(kAxisS), 0.3);
  const ConditionalPmf channel = ConditionalPmf::bsc(bit(kAxisX), bit(kAxisY), 0.1);
  const JointPmf joint = compose({
      factor(kAxisS, source),
      factor(kAxisX, {kAxisS}, ConditionalPmf::bsc(bit(kAxisS), bit(kAxisX), 0.2)),
      factor(kAxisY, {kAxisX}, channel),
      factor(kAxisShat, {kAxisY}, ConditionalPmf::identity(bit(kAxisY), bit(kAxisShat))),
  });
  const CoordinationTarget t{source, channel, joint};
  REQUIRE(validate_target(t).ok);
  const MembershipVerdict v = check_strictly_causal(t, 2, quick_search(69));
  CHECK(v.status == MembershipStatus::infeasible_factorization);
  CHECK(v.log.note.find("P_S * P_X") != std::string::npos);
}

TEST_CASE("brute force agrees with the closed-form binary example") {
  auto [target, witness] = make_binary_example(0.4, 0.1, 0.2);
  BruteForceConfig cfg;
  cfg.grid_step = 0.05;
  const MembershipVerdict v = brute_force_membership(target, Scheme::noncausal, 2, 2, cfg);
  REQUIRE(v.status == MembershipStatus::member_with_witness);
  CHECK(std::abs(v.witness->slack_bits - 0.23006) <= 0.02);
  CHECK(verify_witness(target, *v.witness, cfg.grid_step, 1e-9).valid);
}

TEST_CASE("brute force reports best residual on non-members") {
  auto [t, w] = make_lossless_state(0.5, 0.3);
  BruteForceConfig cfg;
  cfg.grid_step = 0.1;
  const MembershipVerdict v = brute_force_membership(t, Scheme::noncausal, 2, 2, cfg);
  CHECK(v.status == MembershipStatus::not_found);
  CHECK(v.log.best_residual > cfg.grid_step);
  CHECK(v.log.note.find("residual") != std::string::npos);
}

TEST_CASE("brute force on a fully deterministic target") {
  const Pmf source = Pmf::point_mass(bit(kAxisS), 0);
  const ConditionalPmf channel = ConditionalPmf::bsc(bit(kAxisX), bit(kAxisY), 0.0);
  const JointPmf joint = compose({
      factor(kAxisS, source),
      factor(kAxisX, {kAxisS}, ConditionalPmf::identity(bit(kAxisS), bit(kAxisX))),
      factor(kAxisY, {kAxisX}, channel),
      factor(kAxisShat, {kAxisY}, ConditionalPmf::identity(bit(kAxisY), bit(kAxisShat))),
  });
  const CoordinationTarget t{source, channel, joint};
  BruteForceConfig cfg;
  cfg.grid_step = 0.5;
  const MembershipVerdict v = brute_force_membership(t, Scheme::noncausal, 1, 1, cfg);
  REQUIRE(v.status == MembershipStatus::member_with_witness);
  CHECK(verify_witness(t, *v.witness, 0.5, 1e-9).valid);
}

TEST_CASE("brute force grid guard fires") {
  auto [target, witness] = make_binary_example(0.4, 0.1, 0.2);
  BruteForceConfig cfg;
  cfg.grid_step = 0.01;
  cfg.max_points = 1000;
  CHECK_THROWS_AS(brute_force_membership(target, Scheme::noncausal, 2, 2, cfg),
                  std::invalid_argument);
}

TEST_CASE("strictly causal members lift to causal on sampled instances") {
  Rng rng(808);
  int built = 0;
  while (built < 50) {
    // random strictly causal witness composed into a self-consistent target
    const double px1 = 0.2 + 0.6 * rng.next_unit();
    const double ch = 0.02 + 0.08 * rng.next_unit();
    const Pmf psrc = Pmf::bernoulli(bit(kAxisS), 0.05 + 0.2 * rng.next_unit());
    const ConditionalPmf channel = ConditionalPmf::bsc(bit(kAxisX), bit(kAxisY), ch);
    std::vector<std::vector<double>> v_rows;
    for (int r = 0; r < 4; ++r) v_rows.push_back(testutil::random_simplex(2, rng));
    Witness w;
    w.scheme = Scheme::strictly_causal;
    w.aux_alphabets = {bit(kAxisV)};
    w.factors.emplace("X", ConditionalPmf({}, bit(kAxisX), {{1.0 - px1, px1}}));
    w.factors.emplace("V|XS", ConditionalPmf({bit(kAxisX), bit(kAxisS)}, bit(kAxisV), v_rows));
    std::vector<size_t> shat_table{0, 0, 1, 1};  // shat(v,y) = v
    w.maps.emplace("shat", SymbolMap({bit(kAxisV), bit(kAxisY)}, bit(kAxisShat), shat_table));

    const CoordinationTarget t{psrc, channel,
                               [&] {
                                 CoordinationTarget tmp{psrc, channel, JointPmf()};
                                 const JointPmf aug = witness_joint(tmp, w);
                                 return marginalize(aug, {kAxisS, kAxisX, kAxisY, kAxisShat});
                               }()};
    const CertificateCheck check = verify_witness(t, w);
    if (!check.valid) continue;  // constraint can fail for unlucky draws
    ++built;
    const Witness lifted = strict_to_causal(w);
    CHECK(verify_witness(t, lifted).valid);
  }
}

TEST_CASE("search monotonicity in the auxiliary cardinality") {
  auto [target, witness] = make_binary_example(0.4, 0.1, 0.2);
  SearchConfig small = quick_search(90, 8);
  const MembershipVerdict v2 = check_noncausal_inner(target, 2, small);
  REQUIRE(v2.status == MembershipStatus::member_with_witness);

  SearchConfig big = quick_search(91, 2);
  big.hint = v2.witness;
  const MembershipVerdict v3 = check_noncausal_inner(target, 3, big);
  CHECK(v3.status == MembershipStatus::member_with_witness);
  CHECK(v3.witness->slack_bits >= v2.witness->slack_bits - 1e-6);
}
