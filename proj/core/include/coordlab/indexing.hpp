#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace coordlab {

// Row-major (C order) indexing of a product space: the last axis varies
// fastest. All flat mass/table layouts in the library follow this order.
class ProductIndexer {
 public:
  ProductIndexer() : total_(1) {}
  explicit ProductIndexer(std::vector<size_t> sizes);

  size_t total() const { return total_; }
  size_t rank() const { return sizes_.size(); }
  const std::vector<size_t>& sizes() const { return sizes_; }

  size_t flat(std::span<const size_t> tuple) const;
  void unflat(size_t index, std::span<size_t> out) const;
  std::vector<size_t> tuple_of(size_t index) const;

 private:
  std::vector<size_t> sizes_;
  std::vector<size_t> strides_;
  size_t total_;
};

}  // namespace coordlab
