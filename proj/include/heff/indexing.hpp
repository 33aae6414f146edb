#pragma once

#include <cstdint>
#include <vector>

namespace heff {

// Row-major indexing of (i1..ir) tuples over {0..dim-1}: i1 varies slowest,
// matching the vectorization (c_{1..11}, c_{1..12}, ...). Single source of
// truth for C-integral tensors, constraint-matrix columns and the span probe.
struct TupleIndexer {
  int dim = 0;
  int r = 0;

  std::int64_t size() const {
    std::int64_t s = 1;
    for (int k = 0; k < r; ++k) s *= dim;
    return s;
  }

  std::int64_t index(const std::vector<int>& tuple) const {
    std::int64_t idx = 0;
    for (int k = 0; k < r; ++k) idx = idx * dim + tuple[k];
    return idx;
  }

  std::vector<int> unpack(std::int64_t idx) const {
    std::vector<int> tuple(r);
    for (int k = r - 1; k >= 0; --k) {
      tuple[k] = static_cast<int>(idx % dim);
      idx /= dim;
    }
    return tuple;
  }

  std::int64_t reversed(std::int64_t idx) const {
    std::int64_t rev = 0;
    for (int k = 0; k < r; ++k) {
      rev = rev * dim + idx % dim;
      idx /= dim;
    }
    return rev;
  }
};

}  // namespace heff
