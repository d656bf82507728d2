#include "causalvid/core/kernels.hpp"

#include <atomic>
#include <cmath>

namespace cvid::kernels {

namespace {
std::atomic<bool> g_parallel{true};

// Below these sizes the OpenMP fork costs more than it saves.
constexpr long long kMatmulFlopCutoff = 1LL << 15;
constexpr size_t kElemCutoff = 1u << 14;
}  // namespace

bool parallel_enabled() { return g_parallel.load(std::memory_order_relaxed); }
void set_parallel(bool on) { g_parallel.store(on, std::memory_order_relaxed); }

namespace serial {

void matmul(const double* A, const double* B, double* C, int m, int k, int n) {
  for (int i = 0; i < m; ++i) {
    double* ci = C + static_cast<size_t>(i) * n;
    for (int j = 0; j < n; ++j) ci[j] = 0.0;
    const double* ai = A + static_cast<size_t>(i) * k;
    for (int p = 0; p < k; ++p) {
      const double aip = ai[p];
      const double* bp = B + static_cast<size_t>(p) * n;
      for (int j = 0; j < n; ++j) ci[j] += aip * bp[j];
    }
  }
}

void matmul_tn(const double* A, const double* B, double* C, int m, int k, int n) {
  for (int i = 0; i < m; ++i) {
    double* ci = C + static_cast<size_t>(i) * n;
    for (int j = 0; j < n; ++j) ci[j] = 0.0;
    for (int p = 0; p < k; ++p) {
      const double aip = A[static_cast<size_t>(p) * m + i];
      const double* bp = B + static_cast<size_t>(p) * n;
      for (int j = 0; j < n; ++j) ci[j] += aip * bp[j];
    }
  }
}

void matmul_nt(const double* A, const double* B, double* C, int m, int k, int n) {
  for (int i = 0; i < m; ++i) {
    const double* ai = A + static_cast<size_t>(i) * k;
    double* ci = C + static_cast<size_t>(i) * n;
    for (int j = 0; j < n; ++j) {
      const double* bj = B + static_cast<size_t>(j) * k;
      double s = 0.0;
      for (int p = 0; p < k; ++p) s += ai[p] * bj[p];
      ci[j] = s;
    }
  }
}

void ew_add(const double* a, const double* b, double* y, size_t n) {
  for (size_t i = 0; i < n; ++i) y[i] = a[i] + b[i];
}
void ew_sub(const double* a, const double* b, double* y, size_t n) {
  for (size_t i = 0; i < n; ++i) y[i] = a[i] - b[i];
}
void ew_mul(const double* a, const double* b, double* y, size_t n) {
  for (size_t i = 0; i < n; ++i) y[i] = a[i] * b[i];
}
void ew_tanh(const double* x, double* y, size_t n) {
  for (size_t i = 0; i < n; ++i) y[i] = std::tanh(x[i]);
}
void ew_sigmoid(const double* x, double* y, size_t n) {
  for (size_t i = 0; i < n; ++i) y[i] = 1.0 / (1.0 + std::exp(-x[i]));
}

void row_softmax(const double* x, double* y, int rows, int cols) {
  for (int r = 0; r < rows; ++r) {
    const double* xr = x + static_cast<size_t>(r) * cols;
    double* yr = y + static_cast<size_t>(r) * cols;
    double mx = xr[0];
    for (int c = 1; c < cols; ++c) mx = std::max(mx, xr[c]);
    double z = 0.0;
    for (int c = 0; c < cols; ++c) {
      yr[c] = std::exp(xr[c] - mx);
      z += yr[c];
    }
    for (int c = 0; c < cols; ++c) yr[c] /= z;
  }
}

}  // namespace serial

namespace omp {

void matmul(const double* A, const double* B, double* C, int m, int k, int n) {
#pragma omp parallel for schedule(static)
  for (int i = 0; i < m; ++i) {
    double* ci = C + static_cast<size_t>(i) * n;
    for (int j = 0; j < n; ++j) ci[j] = 0.0;
    const double* ai = A + static_cast<size_t>(i) * k;
    for (int p = 0; p < k; ++p) {
      const double aip = ai[p];
      const double* bp = B + static_cast<size_t>(p) * n;
      for (int j = 0; j < n; ++j) ci[j] += aip * bp[j];
    }
  }
}

void matmul_tn(const double* A, const double* B, double* C, int m, int k, int n) {
#pragma omp parallel for schedule(static)
  for (int i = 0; i < m; ++i) {
    double* ci = C + static_cast<size_t>(i) * n;
    for (int j = 0; j < n; ++j) ci[j] = 0.0;
    for (int p = 0; p < k; ++p) {
      const double aip = A[static_cast<size_t>(p) * m + i];
      const double* bp = B + static_cast<size_t>(p) * n;
      for (int j = 0; j < n; ++j) ci[j] += aip * bp[j];
    }
  }
}

void matmul_nt(const double* A, const double* B, double* C, int m, int k, int n) {
#pragma omp parallel for schedule(static)
  for (int i = 0; i < m; ++i) {
    const double* ai = A + static_cast<size_t>(i) * k;
    double* ci = C + static_cast<size_t>(i) * n;
    for (int j = 0; j < n; ++j) {
      const double* bj = B + static_cast<size_t>(j) * k;
      double s = 0.0;
      for (int p = 0; p < k; ++p) s += ai[p] * bj[p];
      ci[j] = s;
    }
  }
}

void ew_add(const double* a, const double* b, double* y, size_t n) {
  const long long nn = static_cast<long long>(n);
#pragma omp parallel for schedule(static)
  for (long long i = 0; i < nn; ++i) y[i] = a[i] + b[i];
}
void ew_sub(const double* a, const double* b, double* y, size_t n) {
  const long long nn = static_cast<long long>(n);
#pragma omp parallel for schedule(static)
  for (long long i = 0; i < nn; ++i) y[i] = a[i] - b[i];
}
void ew_mul(const double* a, const double* b, double* y, size_t n) {
  const long long nn = static_cast<long long>(n);
#pragma omp parallel for schedule(static)
  for (long long i = 0; i < nn; ++i) y[i] = a[i] * b[i];
}
void ew_tanh(const double* x, double* y, size_t n) {
  const long long nn = static_cast<long long>(n);
#pragma omp parallel for schedule(static)
  for (long long i = 0; i < nn; ++i) y[i] = std::tanh(x[i]);
}
void ew_sigmoid(const double* x, double* y, size_t n) {
  const long long nn = static_cast<long long>(n);
#pragma omp parallel for schedule(static)
  for (long long i = 0; i < nn; ++i) y[i] = 1.0 / (1.0 + std::exp(-x[i]));
}

void row_softmax(const double* x, double* y, int rows, int cols) {
#pragma omp parallel for schedule(static)
  for (int r = 0; r < rows; ++r)
    serial::row_softmax(x + static_cast<size_t>(r) * cols, y + static_cast<size_t>(r) * cols, 1,
                        cols);
}

}  // namespace omp

void matmul(const double* A, const double* B, double* C, int m, int k, int n) {
  if (parallel_enabled() && static_cast<long long>(m) * k * n >= kMatmulFlopCutoff && m > 1)
    omp::matmul(A, B, C, m, k, n);
  else
    serial::matmul(A, B, C, m, k, n);
}
void matmul_tn(const double* A, const double* B, double* C, int m, int k, int n) {
  if (parallel_enabled() && static_cast<long long>(m) * k * n >= kMatmulFlopCutoff && m > 1)
    omp::matmul_tn(A, B, C, m, k, n);
  else
    serial::matmul_tn(A, B, C, m, k, n);
}
void matmul_nt(const double* A, const double* B, double* C, int m, int k, int n) {
  if (parallel_enabled() && static_cast<long long>(m) * k * n >= kMatmulFlopCutoff && m > 1)
    omp::matmul_nt(A, B, C, m, k, n);
  else
    serial::matmul_nt(A, B, C, m, k, n);
}
void ew_add(const double* a, const double* b, double* y, size_t n) {
  if (parallel_enabled() && n >= kElemCutoff)
    omp::ew_add(a, b, y, n);
  else
    serial::ew_add(a, b, y, n);
}
void ew_sub(const double* a, const double* b, double* y, size_t n) {
  if (parallel_enabled() && n >= kElemCutoff)
    omp::ew_sub(a, b, y, n);
  else
    serial::ew_sub(a, b, y, n);
}
void ew_mul(const double* a, const double* b, double* y, size_t n) {
  if (parallel_enabled() && n >= kElemCutoff)
    omp::ew_mul(a, b, y, n);
  else
    serial::ew_mul(a, b, y, n);
}
void ew_tanh(const double* x, double* y, size_t n) {
  if (parallel_enabled() && n >= kElemCutoff)
    omp::ew_tanh(x, y, n);
  else
    serial::ew_tanh(x, y, n);
}
void ew_sigmoid(const double* x, double* y, size_t n) {
  if (parallel_enabled() && n >= kElemCutoff)
    omp::ew_sigmoid(x, y, n);
  else
    serial::ew_sigmoid(x, y, n);
}
void row_softmax(const double* x, double* y, int rows, int cols) {
  if (parallel_enabled() && static_cast<long long>(rows) * cols >= static_cast<long long>(kElemCutoff) && rows > 1)
    omp::row_softmax(x, y, rows, cols);
  else
    serial::row_softmax(x, y, rows, cols);
}

Mat matmul(const Mat& A, const Mat& B) {
  CVID_CHECK(A.cols == B.rows,
             "matmul: inner dims differ (" << A.rows << "x" << A.cols << ") * (" << B.rows << "x"
                                           << B.cols << ")");
  Mat C(A.rows, B.cols);
  matmul(A.data(), B.data(), C.data(), A.rows, A.cols, B.cols);
  return C;
}

Mat matmul_tn(const Mat& A, const Mat& B) {
  CVID_CHECK(A.rows == B.rows, "matmul_tn: shared dim differs");
  Mat C(A.cols, B.cols);
  matmul_tn(A.data(), B.data(), C.data(), A.cols, A.rows, B.cols);
  return C;
}

Mat matmul_nt(const Mat& A, const Mat& B) {
  CVID_CHECK(A.cols == B.cols, "matmul_nt: shared dim differs");
  Mat C(A.rows, B.rows);
  matmul_nt(A.data(), B.data(), C.data(), A.rows, A.cols, B.rows);
  return C;
}

Mat row_softmax(const Mat& x) {
  Mat y(x.rows, x.cols);
  row_softmax(x.data(), y.data(), x.rows, x.cols);
  return y;
}

}  // namespace cvid::kernels
