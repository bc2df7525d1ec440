#include "coordlab/region.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <stdexcept>

#include "coordlab/parallel.hpp"

namespace coordlab {

std::string_view membership_status_name(MembershipStatus s) {
  switch (s) {
    case MembershipStatus::member_with_witness: return "member_with_witness";
    case MembershipStatus::not_found: return "not_found";
    case MembershipStatus::infeasible_factorization: return "infeasible_factorization";
  }
  return "?";
}

size_t default_card_u(const CoordinationTarget& t) {
  return t.joint.axes()[0].size() * t.joint.axes()[1].size() + 2;
}

size_t default_card_v(const CoordinationTarget& t) {
  return t.joint.axes()[0].size() * t.joint.axes()[1].size() * t.joint.axes()[2].size() + 2;
}

namespace {

double weights_entropy(std::span<const double> w) {
  double h = 0.0;
  for (double p : w)
    if (p > 0.0) h -= p * std::log2(p);
  return h;
}

struct EvalResult {
  double tv = std::numeric_limits<double>::infinity();
  double lhs = 0.0;
  double rhs = 0.0;
  double slack() const { return rhs - lhs; }
  double residual() const { return tv + std::max(0.0, lhs - rhs); }
};

struct SimplexBlock {
  size_t rows;
  size_t width;
};

struct MapSpec {
  size_t domain;
  size_t codomain;
};

using Params = std::vector<std::vector<double>>;      // one flat rows*width array per block
using MapTables = std::vector<std::vector<size_t>>;   // one table per map

struct Workspace {
  std::vector<double> m4;  // (S,X,Y,Shat) marginal of the composed joint
  std::vector<double> a;   // aux-group marginal
  std::vector<double> as;  // aux-group x S
  std::vector<double> y;   // Y marginal
  std::vector<double> ay;  // aux-group x Y
};

// Shared problem geometry extracted from the target.
struct TargetView {
  size_t ns, nx, ny, nh;
  std::vector<double> ps;    // source mass
  std::vector<double> ch;    // channel, nx * ny
  std::vector<double> tgt;   // target joint, C order (s,x,y,h)
  Alphabet s_alpha, x_alpha, y_alpha, h_alpha;

  explicit TargetView(const CoordinationTarget& t)
      : ns(t.joint.axes()[0].size()),
        nx(t.joint.axes()[1].size()),
        ny(t.joint.axes()[2].size()),
        nh(t.joint.axes()[3].size()),
        ps(t.source.mass()),
        tgt(t.joint.mass()),
        s_alpha(t.joint.axes()[0]),
        x_alpha(t.joint.axes()[1]),
        y_alpha(t.joint.axes()[2]),
        h_alpha(t.joint.axes()[3]) {
    ch.reserve(nx * ny);
    for (size_t x = 0; x < nx; ++x) {
      auto row = t.channel.row(x);
      ch.insert(ch.end(), row.begin(), row.end());
    }
  }
};

class Problem {
 public:
  virtual ~Problem() = default;

  const std::vector<SimplexBlock>& blocks() const { return blocks_; }
  const std::vector<MapSpec>& maps() const { return maps_; }

  virtual EvalResult eval(const Params& p, const MapTables& m, Workspace& ws) const = 0;
  virtual Witness make_witness(const Params& p, const MapTables& m) const = 0;
  // returns false when the hint does not fit this problem
  virtual bool inject_hint(const Witness& hint, Params& p, MapTables& m) const = 0;

 protected:
  std::vector<SimplexBlock> blocks_;
  std::vector<MapSpec> maps_;
};

void mi_pair(const Workspace& ws, std::span<const double> ps, EvalResult& out) {
  const double ha = weights_entropy(ws.a);
  const double hy = weights_entropy(ws.y);
  out.lhs = ha + weights_entropy(ps) - weights_entropy(ws.as);
  out.rhs = ha + hy - weights_entropy(ws.ay);
}

double tv_to_target(const std::vector<double>& m4, const std::vector<double>& tgt) {
  double acc = 0.0;
  for (size_t i = 0; i < tgt.size(); ++i) acc += std::abs(m4[i] - tgt[i]);
  return 0.5 * acc;
}

void zero_resize(std::vector<double>& v, size_t n) {
  v.assign(n, 0.0);
}

std::vector<std::vector<double>> rows_from_flat(const std::vector<double>& flat, size_t rows,
                                                size_t width) {
  std::vector<std::vector<double>> out(rows);
  for (size_t r = 0; r < rows; ++r) {
    out[r].assign(flat.begin() + r * width, flat.begin() + (r + 1) * width);
    double sum = 0.0;
    for (double v : out[r]) sum += v;
    if (sum <= 0.0) {
      out[r].assign(width, 0.0);
      out[r][0] = 1.0;
    } else {
      for (double& v : out[r]) v /= sum;
    }
  }
  return out;
}

class NoncausalProblem : public Problem {
 public:
  NoncausalProblem(TargetView view, size_t card_u) : t_(std::move(view)), nu_(card_u) {
    blocks_ = {{t_.ns, nu_}};                             // P(U|S)
    maps_ = {{t_.ns * nu_, t_.nx}, {nu_ * t_.ny, t_.nh}}; // x(s,u), shat(u,y)
  }

  EvalResult eval(const Params& p, const MapTables& m, Workspace& ws) const override {
    const auto& pu_s = p[0];
    const auto& xm = m[0];
    const auto& sm = m[1];
    zero_resize(ws.m4, t_.ns * t_.nx * t_.ny * t_.nh);
    zero_resize(ws.a, nu_);
    zero_resize(ws.as, nu_ * t_.ns);
    zero_resize(ws.y, t_.ny);
    zero_resize(ws.ay, nu_ * t_.ny);
    for (size_t s = 0; s < t_.ns; ++s) {
      for (size_t u = 0; u < nu_; ++u) {
        const double w = t_.ps[s] * pu_s[s * nu_ + u];
        if (w == 0.0) continue;
        const size_t x = xm[s * nu_ + u];
        for (size_t y = 0; y < t_.ny; ++y) {
          const double wy = w * t_.ch[x * t_.ny + y];
          const size_t h = sm[u * t_.ny + y];
          ws.m4[((s * t_.nx + x) * t_.ny + y) * t_.nh + h] += wy;
          ws.a[u] += wy;
          ws.as[u * t_.ns + s] += wy;
          ws.y[y] += wy;
          ws.ay[u * t_.ny + y] += wy;
        }
      }
    }
    EvalResult r;
    r.tv = tv_to_target(ws.m4, t_.tgt);
    mi_pair(ws, t_.ps, r);
    return r;
  }

  Witness make_witness(const Params& p, const MapTables& m) const override {
    Alphabet u_alpha = Alphabet::indexed(kAxisU, nu_);
    Witness w;
    w.scheme = Scheme::noncausal;
    w.aux_alphabets = {u_alpha};
    w.factors.emplace("U|S", ConditionalPmf({t_.s_alpha}, u_alpha,
                                            rows_from_flat(p[0], t_.ns, nu_)));
    w.maps.emplace("x", SymbolMap({t_.s_alpha, u_alpha}, t_.x_alpha, m[0]));
    w.maps.emplace("shat", SymbolMap({u_alpha, t_.y_alpha}, t_.h_alpha, m[1]));
    return w;
  }

  bool inject_hint(const Witness& hint, Params& p, MapTables& m) const override {
    if (hint.scheme != Scheme::noncausal) return false;
    auto fit = hint.factors.find("U|S");
    auto xit = hint.maps.find("x");
    auto sit = hint.maps.find("shat");
    if (fit == hint.factors.end() || xit == hint.maps.end() || sit == hint.maps.end()) return false;
    const size_t hu = fit->second.to().size();
    if (hu > nu_ || fit->second.row_count() != t_.ns) return false;
    p.assign(1, std::vector<double>(t_.ns * nu_, 0.0));
    for (size_t s = 0; s < t_.ns; ++s) {
      auto row = fit->second.row(s);
      for (size_t u = 0; u < hu; ++u) p[0][s * nu_ + u] = row[u];
    }
    m.assign(2, {});
    m[0].resize(t_.ns * nu_);
    for (size_t s = 0; s < t_.ns; ++s)
      for (size_t u = 0; u < nu_; ++u)
        m[0][s * nu_ + u] = xit->second.apply_flat(s * hu + std::min(u, hu - 1));
    m[1].resize(nu_ * t_.ny);
    for (size_t u = 0; u < nu_; ++u)
      for (size_t y = 0; y < t_.ny; ++y)
        m[1][u * t_.ny + y] = sit->second.apply_flat(std::min(u, hu - 1) * t_.ny + y);
    return true;
  }

 private:
  TargetView t_;
  size_t nu_;
};

class CausalProblem : public Problem {
 public:
  CausalProblem(TargetView view, size_t card_u, size_t card_v)
      : t_(std::move(view)), nu_(card_u), nv_(card_v) {
    blocks_ = {{1, nu_}, {t_.ns * nu_, nv_}};  // P(U), P(V|S,U)
    maps_ = {{t_.ns * nu_, t_.nx}, {nu_ * nv_ * t_.ny, t_.nh}};
  }

  EvalResult eval(const Params& p, const MapTables& m, Workspace& ws) const override {
    const auto& pu = p[0];
    const auto& pv = p[1];
    const auto& xm = m[0];
    const auto& sm = m[1];
    const size_t na = nu_ * nv_;
    zero_resize(ws.m4, t_.ns * t_.nx * t_.ny * t_.nh);
    zero_resize(ws.a, na);
    zero_resize(ws.as, na * t_.ns);
    zero_resize(ws.y, t_.ny);
    zero_resize(ws.ay, na * t_.ny);
    for (size_t u = 0; u < nu_; ++u) {
      if (pu[u] == 0.0) continue;
      for (size_t s = 0; s < t_.ns; ++s) {
        const double wus = pu[u] * t_.ps[s];
        if (wus == 0.0) continue;
        const size_t x = xm[s * nu_ + u];
        for (size_t v = 0; v < nv_; ++v) {
          const double w = wus * pv[(s * nu_ + u) * nv_ + v];
          if (w == 0.0) continue;
          const size_t uv = u * nv_ + v;
          for (size_t y = 0; y < t_.ny; ++y) {
            const double wy = w * t_.ch[x * t_.ny + y];
            const size_t h = sm[(u * nv_ + v) * t_.ny + y];
            ws.m4[((s * t_.nx + x) * t_.ny + y) * t_.nh + h] += wy;
            ws.a[uv] += wy;
            ws.as[uv * t_.ns + s] += wy;
            ws.y[y] += wy;
            ws.ay[uv * t_.ny + y] += wy;
          }
        }
      }
    }
    EvalResult r;
    r.tv = tv_to_target(ws.m4, t_.tgt);
    mi_pair(ws, t_.ps, r);
    return r;
  }

  Witness make_witness(const Params& p, const MapTables& m) const override {
    Alphabet u_alpha = Alphabet::indexed(kAxisU, nu_);
    Alphabet v_alpha = Alphabet::indexed(kAxisV, nv_);
    Witness w;
    w.scheme = Scheme::causal;
    w.aux_alphabets = {u_alpha, v_alpha};
    w.factors.emplace("U", ConditionalPmf({}, u_alpha, rows_from_flat(p[0], 1, nu_)));
    w.factors.emplace("V|SU", ConditionalPmf({t_.s_alpha, u_alpha}, v_alpha,
                                             rows_from_flat(p[1], t_.ns * nu_, nv_)));
    w.maps.emplace("x", SymbolMap({t_.s_alpha, u_alpha}, t_.x_alpha, m[0]));
    w.maps.emplace("shat", SymbolMap({u_alpha, v_alpha, t_.y_alpha}, t_.h_alpha, m[1]));
    return w;
  }

  bool inject_hint(const Witness& hint, Params& p, MapTables& m) const override {
    if (hint.scheme != Scheme::causal) return false;
    auto uit = hint.factors.find("U");
    auto vit = hint.factors.find("V|SU");
    auto xit = hint.maps.find("x");
    auto sit = hint.maps.find("shat");
    if (uit == hint.factors.end() || vit == hint.factors.end() || xit == hint.maps.end() ||
        sit == hint.maps.end())
      return false;
    const size_t hu = uit->second.to().size();
    const size_t hv = vit->second.to().size();
    if (hu > nu_ || hv > nv_ || vit->second.row_count() != t_.ns * hu) return false;
    p.assign(2, {});
    p[0].assign(nu_, 0.0);
    for (size_t u = 0; u < hu; ++u) p[0][u] = uit->second.row(size_t{0})[u];
    p[1].assign(t_.ns * nu_ * nv_, 0.0);
    for (size_t s = 0; s < t_.ns; ++s)
      for (size_t u = 0; u < nu_; ++u) {
        auto row = vit->second.row(s * hu + std::min(u, hu - 1));
        for (size_t v = 0; v < hv; ++v) p[1][(s * nu_ + u) * nv_ + v] = row[v];
      }
    m.assign(2, {});
    m[0].resize(t_.ns * nu_);
    for (size_t s = 0; s < t_.ns; ++s)
      for (size_t u = 0; u < nu_; ++u)
        m[0][s * nu_ + u] = xit->second.apply_flat(s * hu + std::min(u, hu - 1));
    m[1].resize(nu_ * nv_ * t_.ny);
    for (size_t u = 0; u < nu_; ++u)
      for (size_t v = 0; v < nv_; ++v)
        for (size_t y = 0; y < t_.ny; ++y)
          m[1][(u * nv_ + v) * t_.ny + y] = sit->second.apply_flat(
              (std::min(u, hu - 1) * hv + std::min(v, hv - 1)) * t_.ny + y);
    return true;
  }

 private:
  TargetView t_;
  size_t nu_, nv_;
};

class StrictlyCausalProblem : public Problem {
 public:
  StrictlyCausalProblem(TargetView view, size_t card_v) : t_(std::move(view)), nv_(card_v) {
    blocks_ = {{1, t_.nx}, {t_.nx * t_.ns, nv_}};  // P(X), P(V|X,S)
    maps_ = {{nv_ * t_.ny, t_.nh}};                // shat(v,y)
  }

  EvalResult eval(const Params& p, const MapTables& m, Workspace& ws) const override {
    const auto& px = p[0];
    const auto& pv = p[1];
    const auto& sm = m[0];
    const size_t na = t_.nx * nv_;
    zero_resize(ws.m4, t_.ns * t_.nx * t_.ny * t_.nh);
    zero_resize(ws.a, na);
    zero_resize(ws.as, na * t_.ns);
    zero_resize(ws.y, t_.ny);
    zero_resize(ws.ay, na * t_.ny);
    for (size_t s = 0; s < t_.ns; ++s) {
      for (size_t x = 0; x < t_.nx; ++x) {
        const double wsx = t_.ps[s] * px[x];
        if (wsx == 0.0) continue;
        for (size_t v = 0; v < nv_; ++v) {
          const double w = wsx * pv[(x * t_.ns + s) * nv_ + v];
          if (w == 0.0) continue;
          const size_t xv = x * nv_ + v;
          for (size_t y = 0; y < t_.ny; ++y) {
            const double wy = w * t_.ch[x * t_.ny + y];
            const size_t h = sm[v * t_.ny + y];
            ws.m4[((s * t_.nx + x) * t_.ny + y) * t_.nh + h] += wy;
            ws.a[xv] += wy;
            ws.as[xv * t_.ns + s] += wy;
            ws.y[y] += wy;
            ws.ay[xv * t_.ny + y] += wy;
          }
        }
      }
    }
    EvalResult r;
    r.tv = tv_to_target(ws.m4, t_.tgt);
    mi_pair(ws, t_.ps, r);
    return r;
  }

  Witness make_witness(const Params& p, const MapTables& m) const override {
    Alphabet v_alpha = Alphabet::indexed(kAxisV, nv_);
    Witness w;
    w.scheme = Scheme::strictly_causal;
    w.aux_alphabets = {v_alpha};
    w.factors.emplace("X", ConditionalPmf({}, t_.x_alpha, rows_from_flat(p[0], 1, t_.nx)));
    w.factors.emplace("V|XS", ConditionalPmf({t_.x_alpha, t_.s_alpha}, v_alpha,
                                             rows_from_flat(p[1], t_.nx * t_.ns, nv_)));
    w.maps.emplace("shat", SymbolMap({v_alpha, t_.y_alpha}, t_.h_alpha, m[0]));
    return w;
  }

  bool inject_hint(const Witness& hint, Params& p, MapTables& m) const override {
    if (hint.scheme != Scheme::strictly_causal) return false;
    auto xit = hint.factors.find("X");
    auto vit = hint.factors.find("V|XS");
    auto sit = hint.maps.find("shat");
    if (xit == hint.factors.end() || vit == hint.factors.end() || sit == hint.maps.end())
      return false;
    const size_t hv = vit->second.to().size();
    if (hv > nv_ || vit->second.row_count() != t_.nx * t_.ns) return false;
    p.assign(2, {});
    p[0].assign(xit->second.row(size_t{0}).begin(), xit->second.row(size_t{0}).end());
    p[1].assign(t_.nx * t_.ns * nv_, 0.0);
    for (size_t r = 0; r < t_.nx * t_.ns; ++r) {
      auto row = vit->second.row(r);
      for (size_t v = 0; v < hv; ++v) p[1][r * nv_ + v] = row[v];
    }
    m.assign(1, {});
    m[0].resize(nv_ * t_.ny);
    for (size_t v = 0; v < nv_; ++v)
      for (size_t y = 0; y < t_.ny; ++y)
        m[0][v * t_.ny + y] = sit->second.apply_flat(std::min(v, hv - 1) * t_.ny + y);
    return true;
  }

 private:
  TargetView t_;
  size_t nv_;
};

// ---- search driver ----

// combined size of the deterministic-map space, saturating at `cap + 1`
size_t map_combo_count(const std::vector<MapSpec>& maps, size_t cap) {
  size_t total = 1;
  for (const auto& spec : maps) {
    for (size_t d = 0; d < spec.domain; ++d) {
      if (total > cap) return cap + 1;
      total *= spec.codomain;
    }
  }
  return total;
}

MapTables decode_map_combo(const std::vector<MapSpec>& maps, size_t combo) {
  MapTables tables(maps.size());
  for (size_t k = 0; k < maps.size(); ++k) {
    tables[k].resize(maps[k].domain);
    for (size_t d = 0; d < maps[k].domain; ++d) {
      tables[k][d] = combo % maps[k].codomain;
      combo /= maps[k].codomain;
    }
  }
  return tables;
}

MapTables random_maps(const std::vector<MapSpec>& maps, Rng& rng) {
  MapTables tables(maps.size());
  for (size_t k = 0; k < maps.size(); ++k) {
    tables[k].resize(maps[k].domain);
    for (size_t d = 0; d < maps[k].domain; ++d)
      tables[k][d] = rng.next_below(maps[k].codomain);
  }
  return tables;
}

Params random_params(const std::vector<SimplexBlock>& blocks, Rng& rng) {
  Params p(blocks.size());
  for (size_t b = 0; b < blocks.size(); ++b) {
    p[b].resize(blocks[b].rows * blocks[b].width);
    for (size_t r = 0; r < blocks[b].rows; ++r) {
      double sum = 0.0;
      for (size_t i = 0; i < blocks[b].width; ++i) {
        const double e = -std::log(1.0 - rng.next_unit());
        p[b][r * blocks[b].width + i] = e;
        sum += e;
      }
      for (size_t i = 0; i < blocks[b].width; ++i) p[b][r * blocks[b].width + i] /= sum;
    }
  }
  return p;
}

void renormalize(Params& p, const std::vector<SimplexBlock>& blocks) {
  for (size_t b = 0; b < blocks.size(); ++b)
    for (size_t r = 0; r < blocks[b].rows; ++r) {
      double sum = 0.0;
      for (size_t i = 0; i < blocks[b].width; ++i) sum += p[b][r * blocks[b].width + i];
      if (sum > 0.0)
        for (size_t i = 0; i < blocks[b].width; ++i) p[b][r * blocks[b].width + i] /= sum;
    }
}

struct DescentOutcome {
  EvalResult best;
  Params params;
  MapTables maps;
  uint64_t evals = 0;
};

DescentOutcome run_descent(const Problem& prob, Params params, const MapTables& maps,
                           const SearchConfig& cfg) {
  Workspace ws;
  DescentOutcome out;
  out.maps = maps;
  EvalResult cur = prob.eval(params, maps, ws);
  ++out.evals;
  double step = cfg.init_step;
  int sweeps = 0;
  while (step >= cfg.min_step && sweeps < cfg.max_sweeps) {
    ++sweeps;
    bool improved = false;
    for (size_t b = 0; b < prob.blocks().size(); ++b) {
      const size_t width = prob.blocks()[b].width;
      if (width < 2) continue;
      for (size_t r = 0; r < prob.blocks()[b].rows; ++r) {
        double* row = params[b].data() + r * width;
        for (size_t j = 0; j < width; ++j) {
          for (size_t i = 0; i < width; ++i) {
            if (i == j) continue;
            const double delta = std::min(step, row[j]);
            if (delta <= 0.0) continue;
            row[j] -= delta;
            row[i] += delta;
            EvalResult cand = prob.eval(params, maps, ws);
            ++out.evals;
            if (cand.residual() < cur.residual() - 1e-15) {
              cur = cand;
              improved = true;
            } else {
              row[j] += delta;
              row[i] -= delta;
            }
          }
        }
      }
    }
    if (!improved) {
      step *= 0.5;
      renormalize(params, prob.blocks());
      cur = prob.eval(params, maps, ws);
      ++out.evals;
    }
  }
  renormalize(params, prob.blocks());
  out.best = prob.eval(params, maps, ws);
  ++out.evals;
  out.params = std::move(params);
  return out;
}

MembershipVerdict run_search(const CoordinationTarget& t, const Problem& prob,
                             const SearchConfig& cfg, const std::string& inconclusive_note) {
  const size_t combos = map_combo_count(prob.maps(), cfg.map_enum_cap);
  const bool enumerate = combos <= cfg.map_enum_cap;

  struct Task {
    // combo < SIZE_MAX: enumerated maps; otherwise random maps (or the hint)
    size_t combo = SIZE_MAX;
    uint64_t stream = 0;
    bool is_hint = false;
  };
  std::vector<Task> tasks;
  if (enumerate) {
    const size_t budget = static_cast<size_t>(cfg.starts) *
                          static_cast<size_t>(std::max(1, cfg.descent_cap_factor));
    const size_t starts_per_combo =
        std::clamp<size_t>(budget / std::max<size_t>(combos, 1), 1,
                           static_cast<size_t>(std::max(1, cfg.starts)));
    for (size_t c = 0; c < combos; ++c)
      for (size_t k = 0; k < starts_per_combo; ++k)
        tasks.push_back({c, static_cast<uint64_t>(c * starts_per_combo + k), false});
  } else {
    const size_t n = static_cast<size_t>(std::max(1, cfg.starts)) *
                     static_cast<size_t>(std::max(1, cfg.map_samples));
    for (size_t k = 0; k < n; ++k) tasks.push_back({SIZE_MAX, k, false});
  }

  Params hint_params;
  MapTables hint_maps;
  bool have_hint = false;
  if (cfg.hint) {
    have_hint = prob.inject_hint(*cfg.hint, hint_params, hint_maps);
    if (have_hint) tasks.push_back({SIZE_MAX, 0, true});
  }

  Rng master(cfg.seed);
  auto outcomes = parallel_map(tasks.size(), cfg.threads, [&](size_t i) {
    const Task& task = tasks[i];
    if (task.is_hint) return run_descent(prob, hint_params, hint_maps, cfg);
    Rng rng = master.derive("descent", task.stream);
    MapTables maps = task.combo != SIZE_MAX ? decode_map_combo(prob.maps(), task.combo)
                                            : random_maps(prob.maps(), rng);
    return run_descent(prob, random_params(prob.blocks(), rng), maps, cfg);
  });

  MembershipVerdict verdict;
  verdict.log.note = inconclusive_note;
  std::optional<size_t> winner;
  for (size_t i = 0; i < outcomes.size(); ++i) {
    const auto& o = outcomes[i];
    verdict.log.iterations += o.evals;
    verdict.log.best_residual = std::min(verdict.log.best_residual, o.best.residual());
    const bool accepted =
        o.best.residual() <= cfg.match_tol && o.best.slack() >= -cfg.slack_tol;
    if (accepted) {
      verdict.log.best_slack = std::max(verdict.log.best_slack, o.best.slack());
      if (!winner || o.best.slack() > outcomes[*winner].best.slack()) winner = i;
    }
  }
  if (!winner) return verdict;

  Witness w = prob.make_witness(outcomes[*winner].params, outcomes[*winner].maps);
  CertificateCheck check = verify_witness(t, w, cfg.match_tol, cfg.slack_tol);
  if (!check.valid) {
    // should not happen; the certificate checker is the final word
    verdict.log.note = "search accepted a point the certificate checker rejected: " +
                       check.diagnostic;
    return verdict;
  }
  w.slack_bits = check.slack_bits;
  verdict.status = MembershipStatus::member_with_witness;
  verdict.witness = std::move(w);
  return verdict;
}

MembershipVerdict infeasible(const std::string& why) {
  MembershipVerdict v;
  v.status = MembershipStatus::infeasible_factorization;
  v.log.note = why;
  return v;
}

}  // namespace

MembershipVerdict check_noncausal_inner(const CoordinationTarget& t, size_t card_u,
                                        const SearchConfig& cfg) {
  if (card_u < 1) throw std::invalid_argument("check_noncausal_inner: card_u must be >= 1");
  TargetValidation tv = validate_target(t);
  if (!tv.ok) return infeasible(tv.diagnostic);
  NoncausalProblem prob(TargetView(t), card_u);
  return run_search(t, prob, cfg,
                    "not_found is inconclusive: inner bound, heuristic multi-start search");
}

MembershipVerdict check_causal(const CoordinationTarget& t, size_t card_u, size_t card_v,
                               const SearchConfig& cfg) {
  if (card_u < 1 || card_v < 1) throw std::invalid_argument("check_causal: cards must be >= 1");
  TargetValidation tv = validate_target(t);
  if (!tv.ok) return infeasible(tv.diagnostic);
  CausalProblem prob(TargetView(t), card_u, card_v);
  return run_search(t, prob, cfg,
                    "not_found is inconclusive: exact region but heuristic search");
}

MembershipVerdict check_strictly_causal(const CoordinationTarget& t, size_t card_v,
                                        const SearchConfig& cfg) {
  if (card_v < 1) throw std::invalid_argument("check_strictly_causal: card_v must be >= 1");
  TargetValidation tv = validate_target(t);
  if (!tv.ok) return infeasible(tv.diagnostic);
  // the region's factorization forces X independent of S
  const JointPmf sx = marginalize(t.joint, {kAxisS, kAxisX});
  const Pmf ms = marginal_pmf(t.joint, kAxisS);
  const Pmf mx = marginal_pmf(t.joint, kAxisX);
  JointPmf product({sx.axes()[0], sx.axes()[1]}, [&] {
    std::vector<double> mass(ms.size() * mx.size());
    for (size_t s = 0; s < ms.size(); ++s)
      for (size_t x = 0; x < mx.size(); ++x) mass[s * mx.size() + x] = ms[s] * mx[x];
    return mass;
  }());
  const double dep = total_variation(sx, product);
  if (dep > kFactorizationTol)
    return infeasible("target violates the P_S * P_X structure: TV(P_SX, P_S x P_X) = " +
                      std::to_string(dep));
  StrictlyCausalProblem prob(TargetView(t), card_v);
  return run_search(t, prob, cfg,
                    "not_found is inconclusive: exact region but heuristic search");
}

MembershipVerdict check_separation(const CoordinationTarget& t, double match_tol,
                                   double slack_tol) {
  TargetValidation tv = validate_target(t);
  if (!tv.ok) return infeasible(tv.diagnostic);

  const JointPmf m_sh = marginalize(t.joint, {kAxisS, kAxisShat});
  const JointPmf m_xy = marginalize(t.joint, {kAxisX, kAxisY});
  const size_t ns = m_sh.axes()[0].size(), nh = m_sh.axes()[1].size();
  const size_t nx = m_xy.axes()[0].size(), ny = m_xy.axes()[1].size();
  double residual = 0.0;
  std::vector<size_t> tup(4);
  for (size_t s = 0; s < ns; ++s)
    for (size_t x = 0; x < nx; ++x)
      for (size_t y = 0; y < ny; ++y)
        for (size_t h = 0; h < nh; ++h) {
          tup = {s, x, y, h};
          const double prod = m_sh.prob(std::vector<size_t>{s, h}) *
                              m_xy.prob(std::vector<size_t>{x, y});
          residual += std::abs(t.joint.prob(tup) - prod);
        }
  residual *= 0.5;

  const double lhs = mutual_information(t.joint, {kAxisS}, {kAxisShat});
  const double rhs = mutual_information(t.joint, {kAxisX}, {kAxisY});

  MembershipVerdict v;
  v.log.iterations = 1;
  v.log.best_residual = residual;
  v.log.best_slack = rhs - lhs;
  if (residual > match_tol) {
    v.status = MembershipStatus::not_found;
    v.log.note = "joint does not factor as P_{S,Shat} x P_{X,Y}: residual " +
                 std::to_string(residual);
    return v;
  }
  if (lhs > rhs + slack_tol) {
    v.status = MembershipStatus::not_found;
    v.log.note = "I(S;Shat) = " + std::to_string(lhs) + " exceeds I(X;Y) = " +
                 std::to_string(rhs);
    return v;
  }

  Witness w;
  w.scheme = Scheme::separation;
  w.factors.emplace("Shat|S", conditional_of(t.joint, kAxisShat, {kAxisS}));
  w.factors.emplace("X", ConditionalPmf({}, t.joint.axes()[1],
                                         {marginal_pmf(t.joint, kAxisX).mass()}));
  w.slack_bits = rhs - lhs;
  v.status = MembershipStatus::member_with_witness;
  v.witness = std::move(w);
  return v;
}

std::pair<CoordinationTarget, Witness> make_binary_example(double p, double eps, double d) {
  if (!(eps >= 0.0) || !(eps <= d) || !(d <= p) || !(p <= 0.5) || !(d < 0.5))
    throw std::invalid_argument(
        "make_binary_example: parameters must satisfy 0 <= eps <= d <= p <= 1/2 and d < 1/2");

  const double q = (p - d) / (1.0 - 2.0 * d);
  const double px[2] = {1.0 - q, q};
  const double z1[2] = {1.0 - d, d};
  const double z2[2] = {1.0 - eps, eps};

  Alphabet s_alpha = Alphabet::binary(kAxisS);
  Alphabet x_alpha = Alphabet::binary(kAxisX);
  Alphabet y_alpha = Alphabet::binary(kAxisY);
  Alphabet h_alpha = Alphabet::binary(kAxisShat);
  Alphabet u_alpha = Alphabet::binary(kAxisU);

  // S = X + Z1, Y = X + Z2 (mod 2), Shat = X
  std::vector<double> mass(16, 0.0);
  for (size_t s = 0; s < 2; ++s)
    for (size_t x = 0; x < 2; ++x)
      for (size_t y = 0; y < 2; ++y)
        mass[((s * 2 + x) * 2 + y) * 2 + x] = px[x] * z1[s ^ x] * z2[y ^ x];

  CoordinationTarget target{Pmf::bernoulli(s_alpha, p),
                            ConditionalPmf::bsc(x_alpha, y_alpha, eps),
                            JointPmf({s_alpha, x_alpha, y_alpha, h_alpha}, std::move(mass))};

  const double psrc[2] = {px[0] * z1[0] + px[1] * z1[1], px[0] * z1[1] + px[1] * z1[0]};
  std::vector<std::vector<double>> u_rows(2, std::vector<double>(2, 0.0));
  for (size_t s = 0; s < 2; ++s) {
    if (psrc[s] <= 0.0) {
      u_rows[s][0] = 1.0;
      continue;
    }
    for (size_t u = 0; u < 2; ++u) u_rows[s][u] = px[u] * z1[s ^ u] / psrc[s];
  }

  Witness w;
  w.scheme = Scheme::noncausal;
  w.aux_alphabets = {u_alpha};
  w.factors.emplace("U|S", ConditionalPmf({s_alpha}, u_alpha, std::move(u_rows)));
  w.maps.emplace("x", SymbolMap::project({s_alpha, u_alpha}, x_alpha, 1));
  w.maps.emplace("shat", SymbolMap::project({u_alpha, y_alpha}, h_alpha, 0));
  w.slack_bits = verify_witness(target, w).slack_bits;
  return {std::move(target), std::move(w)};
}

std::pair<CoordinationTarget, Witness> make_lossless_state(double p, double channel_eps) {
  if (p < 0.0 || p > 1.0 || channel_eps < 0.0 || channel_eps > 1.0)
    throw std::invalid_argument("make_lossless_state: probabilities must lie in [0,1]");

  Alphabet s_alpha = Alphabet::binary(kAxisS);
  Alphabet x_alpha = Alphabet::binary(kAxisX);
  Alphabet y_alpha = Alphabet::binary(kAxisY);
  Alphabet h_alpha = Alphabet::binary(kAxisShat);
  Alphabet v_alpha = Alphabet::binary(kAxisV);

  const double ps[2] = {1.0 - p, p};
  const double ch[2][2] = {{1.0 - channel_eps, channel_eps}, {channel_eps, 1.0 - channel_eps}};
  std::vector<double> mass(16, 0.0);
  for (size_t s = 0; s < 2; ++s)
    for (size_t x = 0; x < 2; ++x)
      for (size_t y = 0; y < 2; ++y)
        mass[((s * 2 + x) * 2 + y) * 2 + s] = ps[s] * 0.5 * ch[x][y];

  CoordinationTarget target{Pmf::bernoulli(s_alpha, p),
                            ConditionalPmf::bsc(x_alpha, y_alpha, channel_eps),
                            JointPmf({s_alpha, x_alpha, y_alpha, h_alpha}, std::move(mass))};

  // V = S regardless of X
  std::vector<std::vector<double>> v_rows;
  for (size_t x = 0; x < 2; ++x)
    for (size_t s = 0; s < 2; ++s) {
      std::vector<double> row(2, 0.0);
      row[s] = 1.0;
      v_rows.push_back(std::move(row));
    }

  Witness w;
  w.scheme = Scheme::strictly_causal;
  w.aux_alphabets = {v_alpha};
  w.factors.emplace("X", ConditionalPmf({}, x_alpha, {{0.5, 0.5}}));
  w.factors.emplace("V|XS", ConditionalPmf({x_alpha, s_alpha}, v_alpha, std::move(v_rows)));
  w.maps.emplace("shat", SymbolMap::project({v_alpha, y_alpha}, h_alpha, 0));
  w.slack_bits = verify_witness(target, w).slack_bits;
  return {std::move(target), std::move(w)};
}

namespace {

std::vector<std::vector<double>> simplex_grid(size_t width, size_t granularity) {
  std::vector<std::vector<double>> out;
  std::vector<size_t> counts(width, 0);
  // weak compositions of `granularity` into `width` parts
  std::function<void(size_t, size_t)> rec = [&](size_t pos, size_t remaining) {
    if (pos + 1 == width) {
      counts[pos] = remaining;
      std::vector<double> point(width);
      for (size_t i = 0; i < width; ++i)
        point[i] = static_cast<double>(counts[i]) / static_cast<double>(granularity);
      out.push_back(std::move(point));
      return;
    }
    for (size_t k = 0; k <= remaining; ++k) {
      counts[pos] = k;
      rec(pos + 1, remaining - k);
    }
  };
  rec(0, granularity);
  return out;
}

}  // namespace

MembershipVerdict brute_force_membership(const CoordinationTarget& t, Scheme region,
                                         size_t card_u, size_t card_v,
                                         const BruteForceConfig& cfg) {
  TargetValidation tval = validate_target(t);
  if (!tval.ok) return infeasible(tval.diagnostic);

  std::unique_ptr<Problem> prob;
  switch (region) {
    case Scheme::noncausal:
      prob = std::make_unique<NoncausalProblem>(TargetView(t), card_u);
      break;
    case Scheme::causal:
      prob = std::make_unique<CausalProblem>(TargetView(t), card_u, card_v);
      break;
    case Scheme::strictly_causal:
      prob = std::make_unique<StrictlyCausalProblem>(TargetView(t), card_v);
      break;
    case Scheme::separation:
      return check_separation(t, cfg.match_tol < 0 ? kFactorizationTol : cfg.match_tol,
                              cfg.slack_tol);
  }

  const size_t granularity = static_cast<size_t>(std::llround(1.0 / cfg.grid_step));
  if (granularity < 1 || std::abs(cfg.grid_step * granularity - 1.0) > 1e-9)
    throw std::invalid_argument("brute_force_membership: grid_step must divide 1");

  // per-row grid, shared across rows of equal width
  std::vector<std::vector<std::vector<double>>> grids;  // per block
  size_t grid_combos = 1;
  size_t total_rows = 0;
  for (const auto& b : prob->blocks()) {
    grids.push_back(simplex_grid(b.width, granularity));
    for (size_t r = 0; r < b.rows; ++r) {
      if (grid_combos > cfg.max_points / grids.back().size())
        throw std::invalid_argument("brute_force_membership: grid exceeds the point guard");
      grid_combos *= grids.back().size();
      ++total_rows;
    }
  }
  const size_t map_combos = map_combo_count(prob->maps(), cfg.max_points);
  if (map_combos > cfg.max_points / std::max<size_t>(grid_combos, 1))
    throw std::invalid_argument("brute_force_membership: grid exceeds the point guard");
  const size_t total = grid_combos * map_combos;

  const double match_tol = cfg.match_tol < 0 ? cfg.grid_step : cfg.match_tol;

  Workspace ws;
  MembershipVerdict verdict;
  EvalResult best;
  Params best_params;
  MapTables best_maps;
  Params params(prob->blocks().size());
  for (size_t b = 0; b < prob->blocks().size(); ++b)
    params[b].resize(prob->blocks()[b].rows * prob->blocks()[b].width);

  for (size_t mc = 0; mc < map_combos; ++mc) {
    const MapTables maps = decode_map_combo(prob->maps(), mc);
    for (size_t gc = 0; gc < grid_combos; ++gc) {
      size_t rem = gc;
      for (size_t b = 0; b < prob->blocks().size(); ++b) {
        const auto& grid = grids[b];
        const size_t width = prob->blocks()[b].width;
        for (size_t r = 0; r < prob->blocks()[b].rows; ++r) {
          const auto& point = grid[rem % grid.size()];
          rem /= grid.size();
          std::copy(point.begin(), point.end(), params[b].begin() + r * width);
        }
      }
      const EvalResult e = prob->eval(params, maps, ws);
      ++verdict.log.iterations;
      const bool better = e.residual() < best.residual() - 1e-15 ||
                          (std::abs(e.residual() - best.residual()) <= 1e-15 &&
                           e.slack() > best.slack());
      if (better) {
        best = e;
        best_params = params;
        best_maps = maps;
      }
    }
  }
  (void)total;

  verdict.log.best_residual = best.residual();
  verdict.log.best_slack = best.slack();
  if (best.residual() <= match_tol && best.slack() >= -cfg.slack_tol) {
    Witness w = prob->make_witness(best_params, best_maps);
    w.slack_bits = best.slack();
    verdict.status = MembershipStatus::member_with_witness;
    verdict.witness = std::move(w);
  } else {
    verdict.log.note = "best grid point: residual " + std::to_string(best.residual()) +
                       ", slack " + std::to_string(best.slack());
  }
  return verdict;
}

}  // namespace coordlab
