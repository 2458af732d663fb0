#pragma once
/* Dense matrices and 3-tensors over F2, sized for hom spaces of a
 * directed category on a handful of objects. */

#include <cstdint>
#include <vector>

namespace fsforge {

struct F2Matrix {
  int rows = 0, cols = 0;
  std::vector<std::uint8_t> a;  // row-major 0/1

  F2Matrix() = default;
  F2Matrix(int r, int c) : rows(r), cols(c), a(size_t(r) * c, 0) {}
  std::uint8_t& at(int i, int j) { return a[size_t(i) * cols + j]; }
  std::uint8_t at(int i, int j) const { return a[size_t(i) * cols + j]; }

  F2Matrix multiply(const F2Matrix& o) const {
    F2Matrix m(rows, o.cols);
    for (int i = 0; i < rows; ++i)
      for (int k = 0; k < cols; ++k)
        if (at(i, k))
          for (int j = 0; j < o.cols; ++j) m.at(i, j) ^= o.at(k, j);
    return m;
  }
  F2Matrix add(const F2Matrix& o) const {
    F2Matrix m = *this;
    for (size_t k = 0; k < a.size(); ++k) m.a[k] ^= o.a[k];
    return m;
  }
  bool is_zero() const {
    for (auto v : a)
      if (v) return false;
    return true;
  }
};

/* m2 block for a triple (i,j,k): Hom(j,k) x Hom(i,j) -> Hom(i,k);
 * t[out][b][c] with out over Hom(i,k), b over Hom(i,j), c over Hom(j,k). */
struct F2Tensor {
  int d_out = 0, d_b = 0, d_c = 0;
  std::vector<std::uint8_t> a;

  F2Tensor() = default;
  F2Tensor(int out, int b, int c) : d_out(out), d_b(b), d_c(c), a(size_t(out) * b * c, 0) {}
  std::uint8_t& at(int out, int b, int c) { return a[(size_t(out) * d_b + b) * d_c + c]; }
  std::uint8_t at(int out, int b, int c) const { return a[(size_t(out) * d_b + b) * d_c + c]; }
};

}  // namespace fsforge
