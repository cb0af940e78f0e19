#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

namespace storycut {

using index_t = std::int64_t;

// Dense row-major 2-D array of doubles. Vectors are stored as n x 1.
struct Tensor2 {
  index_t rows = 0;
  index_t cols = 0;
  std::vector<double> data;

  Tensor2() = default;
  Tensor2(index_t r, index_t c) : rows(r), cols(c), data(static_cast<std::size_t>(r * c), 0.0) {}

  double& at(index_t r, index_t c) { return data[static_cast<std::size_t>(r * cols + c)]; }
  double at(index_t r, index_t c) const { return data[static_cast<std::size_t>(r * cols + c)]; }

  double* row(index_t r) { return data.data() + r * cols; }
  const double* row(index_t r) const { return data.data() + r * cols; }

  index_t size() const { return rows * cols; }
  bool same_shape(const Tensor2& o) const { return rows == o.rows && cols == o.cols; }

  void fill(double v) { std::fill(data.begin(), data.end(), v); }
  void zero() { fill(0.0); }

  // Copy of rows [r0, r1).
  Tensor2 slice_rows(index_t r0, index_t r1) const {
    Tensor2 out(r1 - r0, cols);
    std::copy(row(r0), row(r0) + (r1 - r0) * cols, out.data.begin());
    return out;
  }

  bool all_finite() const {
    for (double v : data)
      if (!std::isfinite(v)) return false;
    return true;
  }
};

// y += W x
inline void matvec_add(const Tensor2& W, const double* x, double* y) {
  const double* w = W.data.data();
  const index_t n = W.cols;
  for (index_t r = 0; r < W.rows; ++r, w += n) {
    double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
    index_t c = 0;
    for (; c + 4 <= n; c += 4) {
      s0 += w[c] * x[c];
      s1 += w[c + 1] * x[c + 1];
      s2 += w[c + 2] * x[c + 2];
      s3 += w[c + 3] * x[c + 3];
    }
    for (; c < n; ++c) s0 += w[c] * x[c];
    y[r] += (s0 + s1) + (s2 + s3);
  }
}

// x += W^T y
inline void matvec_t_add(const Tensor2& W, const double* y, double* x) {
  const double* w = W.data.data();
  const index_t n = W.cols;
  for (index_t r = 0; r < W.rows; ++r, w += n) {
    const double yr = y[r];
    if (yr == 0.0) continue;
    for (index_t c = 0; c < n; ++c) x[c] += w[c] * yr;
  }
}

// W += y x^T
inline void outer_add(Tensor2& W, const double* y, const double* x) {
  double* w = W.data.data();
  const index_t n = W.cols;
  for (index_t r = 0; r < W.rows; ++r, w += n) {
    const double yr = y[r];
    if (yr == 0.0) continue;
    for (index_t c = 0; c < n; ++c) w[c] += yr * x[c];
  }
}

// Logistic sigmoid, saturating but never non-finite.
inline double sigmoid(double x) {
  if (x >= 0.0) {
    return 1.0 / (1.0 + std::exp(-x));
  }
  const double e = std::exp(x);
  return e / (1.0 + e);
}

inline double dsigmoid_from_value(double s) { return s * (1.0 - s); }
inline double dtanh_from_value(double t) { return 1.0 - t * t; }

}  // namespace storycut
