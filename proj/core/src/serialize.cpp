#include "coordlab/serialize.hpp"

#include <fstream>
#include <stdexcept>

namespace coordlab {

namespace {
void expect_object(const Json& j, const char* what) {
  if (!j.is_object()) throw std::invalid_argument(std::string(what) + ": expected a JSON object");
}

const Json& need(const Json& j, const char* key, const char* what) {
  auto it = j.find(key);
  if (it == j.end())
    throw std::invalid_argument(std::string(what) + ": missing key '" + key + "'");
  return *it;
}
}  // namespace

Json to_json(const Alphabet& a) {
  return Json{{"name", a.name()}, {"symbols", a.symbols()}};
}

Alphabet alphabet_from_json(const Json& j) {
  expect_object(j, "alphabet");
  return Alphabet(need(j, "name", "alphabet").get<std::string>(),
                  need(j, "symbols", "alphabet").get<std::vector<std::string>>());
}

Json to_json(const Pmf& p) {
  return Json{{"alphabet", to_json(p.alphabet())}, {"mass", p.mass()}};
}

Pmf pmf_from_json(const Json& j) {
  expect_object(j, "pmf");
  return Pmf(alphabet_from_json(need(j, "alphabet", "pmf")),
             need(j, "mass", "pmf").get<std::vector<double>>());
}

Json to_json(const ConditionalPmf& c) {
  Json from = Json::array();
  for (const auto& a : c.from()) from.push_back(to_json(a));
  Json rows = Json::array();
  for (size_t r = 0; r < c.row_count(); ++r) {
    auto row = c.row(r);
    rows.push_back(std::vector<double>(row.begin(), row.end()));
  }
  return Json{{"from", std::move(from)}, {"to", to_json(c.to())}, {"rows", std::move(rows)}};
}

ConditionalPmf conditional_from_json(const Json& j) {
  expect_object(j, "conditional");
  std::vector<Alphabet> from;
  for (const auto& a : need(j, "from", "conditional")) from.push_back(alphabet_from_json(a));
  Alphabet to = alphabet_from_json(need(j, "to", "conditional"));
  std::vector<std::vector<double>> rows;
  for (const auto& r : need(j, "rows", "conditional")) rows.push_back(r.get<std::vector<double>>());
  return ConditionalPmf(std::move(from), std::move(to), std::move(rows));
}

Json to_json(const JointPmf& j) {
  Json axes = Json::array();
  for (const auto& a : j.axes()) axes.push_back(to_json(a));
  return Json{{"axes", std::move(axes)}, {"mass", j.mass()}};
}

JointPmf joint_from_json(const Json& j) {
  expect_object(j, "joint");
  std::vector<Alphabet> axes;
  for (const auto& a : need(j, "axes", "joint")) axes.push_back(alphabet_from_json(a));
  return JointPmf(std::move(axes), need(j, "mass", "joint").get<std::vector<double>>());
}

Json to_json(const SymbolMap& m) {
  Json from = Json::array();
  for (const auto& a : m.from()) from.push_back(to_json(a));
  std::vector<std::string> table;
  table.reserve(m.table().size());
  for (size_t idx : m.table()) table.push_back(m.to().symbol(idx));
  return Json{{"from", std::move(from)}, {"to", to_json(m.to())}, {"table", std::move(table)}};
}

SymbolMap symbol_map_from_json(const Json& j) {
  expect_object(j, "symbol_map");
  std::vector<Alphabet> from;
  for (const auto& a : need(j, "from", "symbol_map")) from.push_back(alphabet_from_json(a));
  Alphabet to = alphabet_from_json(need(j, "to", "symbol_map"));
  std::vector<size_t> table;
  for (const auto& s : need(j, "table", "symbol_map"))
    table.push_back(to.index_of(s.get<std::string>()));
  return SymbolMap(std::move(from), std::move(to), std::move(table));
}

Json to_json(const CoordinationTarget& t) {
  return Json{{"source", to_json(t.source)},
              {"channel", to_json(t.channel)},
              {"joint", to_json(t.joint)}};
}

CoordinationTarget target_from_json(const Json& j) {
  expect_object(j, "target");
  return CoordinationTarget{pmf_from_json(need(j, "source", "target")),
                            conditional_from_json(need(j, "channel", "target")),
                            joint_from_json(need(j, "joint", "target"))};
}

Json to_json(const Witness& w) {
  Json aux = Json::array();
  for (const auto& a : w.aux_alphabets) aux.push_back(to_json(a));
  Json factors = Json::object();
  for (const auto& [k, v] : w.factors) factors[k] = to_json(v);
  Json maps = Json::object();
  for (const auto& [k, v] : w.maps) maps[k] = to_json(v);
  return Json{{"scheme", std::string(scheme_name(w.scheme))},
              {"aux_alphabets", std::move(aux)},
              {"factors", std::move(factors)},
              {"maps", std::move(maps)},
              {"slack_bits", w.slack_bits}};
}

Witness witness_from_json(const Json& j) {
  expect_object(j, "witness");
  Witness w;
  w.scheme = scheme_from_name(need(j, "scheme", "witness").get<std::string>());
  for (const auto& a : need(j, "aux_alphabets", "witness")) w.aux_alphabets.push_back(alphabet_from_json(a));
  for (const auto& [k, v] : need(j, "factors", "witness").items())
    w.factors.emplace(k, conditional_from_json(v));
  for (const auto& [k, v] : need(j, "maps", "witness").items())
    w.maps.emplace(k, symbol_map_from_json(v));
  w.slack_bits = need(j, "slack_bits", "witness").get<double>();
  return w;
}

Json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "' for reading");
  Json j;
  try {
    in >> j;
  } catch (const Json::parse_error& e) {
    throw std::runtime_error("parse error in '" + path + "': " + e.what());
  }
  return j;
}

void save_json_file(const std::string& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << j.dump(2) << "\n";
  if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

}  // namespace coordlab
