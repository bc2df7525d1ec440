#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace coordlab {

// A named finite alphabet. The name doubles as the axis label inside joint
// distributions, so two axes over the same symbols (e.g. a source and its
// reconstruction) are distinct alphabets with distinct names.
class Alphabet {
 public:
  Alphabet() = default;
  Alphabet(std::string name, std::vector<std::string> symbols);

  const std::string& name() const { return name_; }
  const std::vector<std::string>& symbols() const { return symbols_; }
  size_t size() const { return symbols_.size(); }

  // index of a symbol label; throws if absent
  size_t index_of(const std::string& symbol) const;
  const std::string& symbol(size_t i) const { return symbols_.at(i); }

  // same name and same symbol list, in order
  bool operator==(const Alphabet& other) const;
  bool operator!=(const Alphabet& other) const { return !(*this == other); }
  // same symbols, possibly different name (compatible for symbol maps)
  bool same_symbols(const Alphabet& other) const { return symbols_ == other.symbols_; }

  Alphabet renamed(std::string new_name) const { return Alphabet(std::move(new_name), symbols_); }

  static Alphabet binary(std::string name);
  // symbols "0".."k-1"
  static Alphabet indexed(std::string name, size_t k);

 private:
  std::string name_;
  std::vector<std::string> symbols_;
};

}  // namespace coordlab
