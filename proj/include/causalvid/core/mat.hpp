#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <vector>

#include "causalvid/core/check.hpp"

namespace cvid {

// Dense row-major matrix of doubles. Row vectors are 1xC, column vectors Rx1.
struct Mat {
  int rows = 0;
  int cols = 0;
  std::vector<double> a;

  Mat() = default;
  Mat(int r, int c) : rows(r), cols(c), a(static_cast<size_t>(r) * static_cast<size_t>(c), 0.0) {
    CVID_CHECK(r >= 0 && c >= 0, "Mat: negative shape " << r << "x" << c);
  }

  static Mat zeros(int r, int c) { return Mat(r, c); }

  static Mat full(int r, int c, double v) {
    Mat m(r, c);
    std::fill(m.a.begin(), m.a.end(), v);
    return m;
  }

  static Mat eye(int n) {
    Mat m(n, n);
    for (int i = 0; i < n; ++i) m.at(i, i) = 1.0;
    return m;
  }

  static Mat row(std::vector<double> v) {
    Mat m;
    m.rows = 1;
    m.cols = static_cast<int>(v.size());
    m.a = std::move(v);
    return m;
  }

  static Mat col(std::vector<double> v) {
    Mat m;
    m.rows = static_cast<int>(v.size());
    m.cols = 1;
    m.a = std::move(v);
    return m;
  }

  double& at(int r, int c) { return a[static_cast<size_t>(r) * cols + c]; }
  double at(int r, int c) const { return a[static_cast<size_t>(r) * cols + c]; }

  size_t size() const { return a.size(); }
  bool empty() const { return a.empty(); }
  double* data() { return a.data(); }
  const double* data() const { return a.data(); }

  bool same_shape(const Mat& o) const { return rows == o.rows && cols == o.cols; }

  bool all_finite() const {
    for (double x : a)
      if (!std::isfinite(x)) return false;
    return true;
  }

  Mat transposed() const {
    Mat t(cols, rows);
    for (int r = 0; r < rows; ++r)
      for (int c = 0; c < cols; ++c) t.at(c, r) = at(r, c);
    return t;
  }

  // Exact elementwise equality; used by determinism and serial-vs-parallel tests.
  friend bool operator==(const Mat& x, const Mat& y) {
    return x.rows == y.rows && x.cols == y.cols && x.a == y.a;
  }
};

inline double max_abs_diff(const Mat& x, const Mat& y) {
  CVID_CHECK(x.same_shape(y), "max_abs_diff: shape mismatch");
  double m = 0.0;
  for (size_t i = 0; i < x.a.size(); ++i) m = std::max(m, std::fabs(x.a[i] - y.a[i]));
  return m;
}

}  // namespace cvid
