#include <doctest.h>

#include <stdexcept>

#include "coordlab/region.hpp"
#include "coordlab/serialize.hpp"
#include "test_util.hpp"

using namespace coordlab;

TEST_CASE("pmf json round-trip is value-exact") {
  const Alphabet a("A", {"lo", "hi"});
  const Pmf p(a, {0.123456789012345, 1.0 - 0.123456789012345});
  const Pmf back = pmf_from_json(to_json(p));
  CHECK(back.alphabet() == a);
  CHECK(back.mass() == p.mass());  // bitwise equality through dump/parse

  // decimal literal with 15 significant digits survives a full cycle
  const Json parsed = Json::parse(R"({"alphabet":{"name":"A","symbols":["lo","hi"]},
                                      "mass":[0.123456789012345,0.876543210987655]})");
  const Pmf q = pmf_from_json(parsed);
  const Json dumped = Json::parse(to_json(q).dump());
  CHECK(pmf_from_json(dumped).mass() == q.mass());
}

TEST_CASE("joint and conditional round-trips") {
  Rng rng(9);
  const JointPmf j = testutil::random_joint({2, 3}, rng);
  const JointPmf back = joint_from_json(to_json(j));
  CHECK(back.same_axes(j));
  CHECK(back.mass() == j.mass());

  const ConditionalPmf c = ConditionalPmf::bsc(Alphabet::binary("X"), Alphabet::binary("Y"), 0.1);
  const ConditionalPmf cb = conditional_from_json(to_json(c));
  CHECK(cb.row(size_t{0})[1] == c.row(size_t{0})[1]);
}

TEST_CASE("target and witness round-trips") {
  auto [target, witness] = make_binary_example(0.4, 0.1, 0.2);
  const CoordinationTarget t2 = target_from_json(to_json(target));
  CHECK(t2.joint.mass() == target.joint.mass());
  CHECK(validate_target(t2).ok);

  const Witness w2 = witness_from_json(to_json(witness));
  CHECK(w2.scheme == Scheme::noncausal);
  CHECK(w2.maps.at("x").table() == witness.maps.at("x").table());
  const CertificateCheck check = verify_witness(t2, w2);
  CHECK(check.valid);
  CHECK(testutil::close(check.slack_bits, witness.slack_bits, 1e-12));
}

TEST_CASE("malformed documents are rejected with context") {
  CHECK_THROWS_WITH_AS(pmf_from_json(Json::parse("[]")), doctest::Contains("pmf"),
                       std::invalid_argument);
  CHECK_THROWS_WITH_AS(alphabet_from_json(Json::parse(R"({"name":"A"})")),
                       doctest::Contains("symbols"), std::invalid_argument);
}
