#pragma once

#include <string>

#include <json.hpp>

#include "coordlab/witness.hpp"

namespace coordlab {

using Json = nlohmann::json;

Json to_json(const Alphabet& a);
Json to_json(const Pmf& p);
Json to_json(const ConditionalPmf& c);
Json to_json(const JointPmf& j);
Json to_json(const SymbolMap& m);
Json to_json(const CoordinationTarget& t);
Json to_json(const Witness& w);

Alphabet alphabet_from_json(const Json& j);
Pmf pmf_from_json(const Json& j);
ConditionalPmf conditional_from_json(const Json& j);
JointPmf joint_from_json(const Json& j);
SymbolMap symbol_map_from_json(const Json& j);
CoordinationTarget target_from_json(const Json& j);
Witness witness_from_json(const Json& j);

// File helpers; throw std::runtime_error with the path on I/O failure.
Json load_json_file(const std::string& path);
void save_json_file(const std::string& path, const Json& j);

}  // namespace coordlab
