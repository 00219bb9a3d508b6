#pragma once

#include <cassert>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace coplaynet {

// Minimal dense row-major matrix; everything in this project is desk scale.
struct Matrix {
  int rows{0};
  int cols{0};
  std::vector<double> data;

  Matrix() = default;
  Matrix(int r, int c)
      : rows(r), cols(c), data(static_cast<std::size_t>(r) * c, 0.0) {}

  double& operator()(int r, int c) {
    assert(r >= 0 && r < rows && c >= 0 && c < cols);
    return data[static_cast<std::size_t>(r) * cols + c];
  }
  double operator()(int r, int c) const {
    assert(r >= 0 && r < rows && c >= 0 && c < cols);
    return data[static_cast<std::size_t>(r) * cols + c];
  }

  std::span<double> row(int r) {
    return {data.data() + static_cast<std::size_t>(r) * cols,
            static_cast<std::size_t>(cols)};
  }
  std::span<const double> row(int r) const {
    return {data.data() + static_cast<std::size_t>(r) * cols,
            static_cast<std::size_t>(cols)};
  }
};

// 0/1 observation mask; kept as bytes so a 5k-node mask stays small.
struct Mask {
  int rows{0};
  int cols{0};
  std::vector<std::uint8_t> data;

  Mask() = default;
  Mask(int r, int c)
      : rows(r), cols(c), data(static_cast<std::size_t>(r) * c, 0) {}

  std::uint8_t& operator()(int r, int c) {
    return data[static_cast<std::size_t>(r) * cols + c];
  }
  std::uint8_t operator()(int r, int c) const {
    return data[static_cast<std::size_t>(r) * cols + c];
  }

  std::span<const std::uint8_t> row(int r) const {
    return {data.data() + static_cast<std::size_t>(r) * cols,
            static_cast<std::size_t>(cols)};
  }
};

inline double dot(std::span<const double> a, std::span<const double> b) {
  assert(a.size() == b.size());
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace coplaynet
