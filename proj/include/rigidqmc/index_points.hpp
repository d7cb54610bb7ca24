#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "rigidqmc/errors.hpp"

namespace rigidqmc {

// Multiset of points of [m_1] x ... x [m_n], stored row-major.
struct IndexPoints {
  std::vector<std::size_t> alphabet;
  std::vector<std::uint32_t> coords;

  std::size_t dim() const { return alphabet.size(); }
  std::size_t size() const { return alphabet.empty() ? 0 : coords.size() / alphabet.size(); }
  std::uint32_t at(std::size_t row, std::size_t j) const { return coords[row * alphabet.size() + j]; }

  void push_back(const std::vector<std::uint32_t>& row) {
    if (row.size() != alphabet.size()) throw ParameterError("index point has the wrong dimension");
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (row[j] >= alphabet[j]) throw ParameterError("index point coordinate outside its alphabet");
    }
    coords.insert(coords.end(), row.begin(), row.end());
  }

  // (0), (1), ..., (n - 1) in [n].
  static IndexPoints identity(std::size_t n) {
    IndexPoints p;
    p.alphabet = {n};
    p.coords.resize(n);
    for (std::size_t i = 0; i < n; ++i) p.coords[i] = static_cast<std::uint32_t>(i);
    return p;
  }
};

}  // namespace rigidqmc
