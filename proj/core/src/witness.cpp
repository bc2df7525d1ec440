#include "coordlab/witness.hpp"

#include <stdexcept>

namespace coordlab {

std::string_view scheme_name(Scheme s) {
  switch (s) {
    case Scheme::noncausal: return "noncausal";
    case Scheme::causal: return "causal";
    case Scheme::strictly_causal: return "strictly_causal";
    case Scheme::separation: return "separation";
  }
  return "?";
}

Scheme scheme_from_name(std::string_view name) {
  if (name == "noncausal") return Scheme::noncausal;
  if (name == "causal") return Scheme::causal;
  if (name == "strictly_causal") return Scheme::strictly_causal;
  if (name == "separation") return Scheme::separation;
  throw std::invalid_argument("unknown scheme '" + std::string(name) + "'");
}

namespace {
const ConditionalPmf& need_factor(const Witness& w, const std::string& key) {
  auto it = w.factors.find(key);
  if (it == w.factors.end())
    throw std::invalid_argument("witness (" + std::string(scheme_name(w.scheme)) +
                                "): missing factor '" + key + "'");
  return it->second;
}

const SymbolMap& need_map(const Witness& w, const std::string& key) {
  auto it = w.maps.find(key);
  if (it == w.maps.end())
    throw std::invalid_argument("witness (" + std::string(scheme_name(w.scheme)) +
                                "): missing map '" + key + "'");
  return it->second;
}
}  // namespace

JointPmf witness_joint(const CoordinationTarget& t, const Witness& w) {
  switch (w.scheme) {
    case Scheme::noncausal:
      return compose({
          factor(kAxisS, t.source),
          factor(kAxisU, {kAxisS}, need_factor(w, "U|S")),
          factor(kAxisX, {kAxisS, kAxisU}, need_map(w, "x").as_conditional()),
          factor(kAxisY, {kAxisX}, t.channel),
          factor(kAxisShat, {kAxisU, kAxisY}, need_map(w, "shat").as_conditional()),
      });
    case Scheme::causal:
      return compose({
          factor(kAxisU, {}, need_factor(w, "U")),
          factor(kAxisS, t.source),
          factor(kAxisV, {kAxisS, kAxisU}, need_factor(w, "V|SU")),
          factor(kAxisX, {kAxisS, kAxisU}, need_map(w, "x").as_conditional()),
          factor(kAxisY, {kAxisX}, t.channel),
          factor(kAxisShat, {kAxisU, kAxisV, kAxisY}, need_map(w, "shat").as_conditional()),
      });
    case Scheme::strictly_causal:
      return compose({
          factor(kAxisS, t.source),
          factor(kAxisX, {}, need_factor(w, "X")),
          factor(kAxisV, {kAxisX, kAxisS}, need_factor(w, "V|XS")),
          factor(kAxisY, {kAxisX}, t.channel),
          factor(kAxisShat, {kAxisV, kAxisY}, need_map(w, "shat").as_conditional()),
      });
    case Scheme::separation:
      return compose({
          factor(kAxisS, t.source),
          factor(kAxisX, {}, need_factor(w, "X")),
          factor(kAxisY, {kAxisX}, t.channel),
          factor(kAxisShat, {kAxisS}, need_factor(w, "Shat|S")),
      });
  }
  throw std::logic_error("witness_joint: bad scheme");
}

std::pair<double, double> witness_constraint(const JointPmf& augmented, Scheme scheme) {
  switch (scheme) {
    case Scheme::noncausal:
      return {mutual_information(augmented, {kAxisU}, {kAxisS}),
              mutual_information(augmented, {kAxisU}, {kAxisY})};
    case Scheme::causal:
      return {mutual_information(augmented, {kAxisU, kAxisV}, {kAxisS}),
              mutual_information(augmented, {kAxisU, kAxisV}, {kAxisY})};
    case Scheme::strictly_causal:
      return {mutual_information(augmented, {kAxisX, kAxisV}, {kAxisS}),
              mutual_information(augmented, {kAxisX, kAxisV}, {kAxisY})};
    case Scheme::separation:
      return {mutual_information(augmented, {kAxisS}, {kAxisShat}),
              mutual_information(augmented, {kAxisX}, {kAxisY})};
  }
  throw std::logic_error("witness_constraint: bad scheme");
}

CertificateCheck verify_witness(const CoordinationTarget& t, const Witness& w,
                                double match_tol, double slack_tol) {
  CertificateCheck c;
  JointPmf augmented;
  try {
    augmented = witness_joint(t, w);
  } catch (const std::exception& e) {
    c.diagnostic = e.what();
    return c;
  }
  const JointPmf marg = marginalize(augmented, {kAxisS, kAxisX, kAxisY, kAxisShat});
  c.marginal_tv = total_variation(marg, t.joint);
  auto [lhs, rhs] = witness_constraint(augmented, w.scheme);
  c.lhs_bits = lhs;
  c.rhs_bits = rhs;
  c.slack_bits = rhs - lhs;
  if (c.marginal_tv > match_tol) {
    c.diagnostic = "composed marginal misses the target by TV " + std::to_string(c.marginal_tv);
    return c;
  }
  if (c.slack_bits < -slack_tol) {
    c.diagnostic = "information constraint violated: LHS " + std::to_string(lhs) + " > RHS " +
                   std::to_string(rhs);
    return c;
  }
  c.valid = true;
  return c;
}

Witness separation_to_noncausal(const CoordinationTarget& t, const Witness& sep) {
  if (sep.scheme != Scheme::separation)
    throw std::invalid_argument("separation_to_noncausal: wrong input scheme");
  const ConditionalPmf& shat_given_s = need_factor(sep, "Shat|S");
  const ConditionalPmf& px = need_factor(sep, "X");

  const Alphabet& x_alpha = t.joint.axes()[1];
  const Alphabet& shat_alpha = t.joint.axes()[3];
  const Alphabet& s_alpha = t.joint.axes()[0];

  // U = (X, Shat) with X independent of S
  std::vector<std::string> u_syms;
  for (const auto& xs : x_alpha.symbols())
    for (const auto& hs : shat_alpha.symbols()) u_syms.push_back(xs + "," + hs);
  Alphabet u_alpha(kAxisU, u_syms);

  const size_t nx = x_alpha.size(), nh = shat_alpha.size(), ns = s_alpha.size();
  std::vector<std::vector<double>> u_rows(ns, std::vector<double>(nx * nh, 0.0));
  for (size_t s = 0; s < ns; ++s)
    for (size_t x = 0; x < nx; ++x)
      for (size_t h = 0; h < nh; ++h)
        u_rows[s][x * nh + h] = px.row(size_t{0})[x] * shat_given_s.row(s)[h];
  ConditionalPmf u_given_s({s_alpha}, u_alpha, std::move(u_rows));

  // x(s,u) reads off the X component, shat(u,y) the Shat component
  std::vector<size_t> x_table(ns * nx * nh);
  for (size_t s = 0; s < ns; ++s)
    for (size_t u = 0; u < nx * nh; ++u) x_table[s * nx * nh + u] = u / nh;
  SymbolMap x_map({s_alpha, u_alpha}, x_alpha, std::move(x_table));

  const size_t ny = t.joint.axes()[2].size();
  std::vector<size_t> shat_table(nx * nh * ny);
  for (size_t u = 0; u < nx * nh; ++u)
    for (size_t y = 0; y < ny; ++y) shat_table[u * ny + y] = u % nh;
  SymbolMap shat_map({u_alpha, t.joint.axes()[2]}, shat_alpha, std::move(shat_table));

  Witness w;
  w.scheme = Scheme::noncausal;
  w.aux_alphabets = {u_alpha};
  w.factors.emplace("U|S", std::move(u_given_s));
  w.maps.emplace("x", std::move(x_map));
  w.maps.emplace("shat", std::move(shat_map));
  w.slack_bits = verify_witness(t, w).slack_bits;
  return w;
}

Witness strict_to_causal(const Witness& sc) {
  if (sc.scheme != Scheme::strictly_causal)
    throw std::invalid_argument("strict_to_causal: wrong input scheme");
  const ConditionalPmf& px = need_factor(sc, "X");
  const ConditionalPmf& v_given_xs = need_factor(sc, "V|XS");
  const SymbolMap& shat_vy = need_map(sc, "shat");

  const Alphabet x_alpha = px.to();
  Alphabet u_alpha = x_alpha.renamed(kAxisU);
  const Alphabet& s_alpha = v_given_xs.from()[1];
  const Alphabet& v_alpha = v_given_xs.to();

  ConditionalPmf p_u({}, u_alpha, {std::vector<double>(px.row(size_t{0}).begin(),
                                                       px.row(size_t{0}).end())});

  // reorder conditioning (X,S) -> (S,U)
  const size_t ns = s_alpha.size(), nx = x_alpha.size(), nv = v_alpha.size();
  std::vector<std::vector<double>> v_rows(ns * nx);
  for (size_t s = 0; s < ns; ++s)
    for (size_t u = 0; u < nx; ++u) {
      auto src = v_given_xs.row(std::vector<size_t>{u, s});
      v_rows[s * nx + u].assign(src.begin(), src.end());
    }
  ConditionalPmf v_given_su({s_alpha, u_alpha}, v_alpha, std::move(v_rows));

  // channel input is just U
  SymbolMap x_map = SymbolMap::project({s_alpha, u_alpha}, x_alpha, 1);

  // reconstruction ignores U
  const Alphabet& y_alpha = shat_vy.from()[1];
  const Alphabet& shat_alpha = shat_vy.to();
  const size_t ny = y_alpha.size();
  std::vector<size_t> shat_table(nx * nv * ny);
  for (size_t u = 0; u < nx; ++u)
    for (size_t v = 0; v < nv; ++v)
      for (size_t y = 0; y < ny; ++y)
        shat_table[(u * nv + v) * ny + y] = shat_vy.apply(std::vector<size_t>{v, y});
  SymbolMap shat_map({u_alpha, v_alpha, y_alpha}, shat_alpha, std::move(shat_table));

  Witness w;
  w.scheme = Scheme::causal;
  w.aux_alphabets = {u_alpha, v_alpha};
  w.factors.emplace("U", std::move(p_u));
  w.factors.emplace("V|SU", std::move(v_given_su));
  w.maps.emplace("x", std::move(x_map));
  w.maps.emplace("shat", std::move(shat_map));
  w.slack_bits = sc.slack_bits;
  return w;
}

}  // namespace coordlab
