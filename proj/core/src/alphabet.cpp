#include "coordlab/alphabet.hpp"

#include <stdexcept>
#include <unordered_set>

namespace coordlab {

Alphabet::Alphabet(std::string name, std::vector<std::string> symbols)
    : name_(std::move(name)), symbols_(std::move(symbols)) {
  if (symbols_.empty()) throw std::invalid_argument("Alphabet '" + name_ + "': needs at least one symbol");
  std::unordered_set<std::string> seen;
  for (const auto& s : symbols_) {
    if (!seen.insert(s).second)
      throw std::invalid_argument("Alphabet '" + name_ + "': duplicate symbol '" + s + "'");
  }
}

size_t Alphabet::index_of(const std::string& symbol) const {
  for (size_t i = 0; i < symbols_.size(); ++i)
    if (symbols_[i] == symbol) return i;
  throw std::out_of_range("Alphabet '" + name_ + "': unknown symbol '" + symbol + "'");
}

bool Alphabet::operator==(const Alphabet& other) const {
  return name_ == other.name_ && symbols_ == other.symbols_;
}

Alphabet Alphabet::binary(std::string name) {
  return Alphabet(std::move(name), {"0", "1"});
}

Alphabet Alphabet::indexed(std::string name, size_t k) {
  std::vector<std::string> syms;
  syms.reserve(k);
  for (size_t i = 0; i < k; ++i) syms.push_back(std::to_string(i));
  return Alphabet(std::move(name), std::move(syms));
}

}  // namespace coordlab
