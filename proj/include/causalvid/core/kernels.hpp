#pragma once

#include <cstddef>

#include "causalvid/core/mat.hpp"

namespace cvid::kernels {

// Kernels come in two flavours: a serial reference and an OpenMP version.
// Parallel loops only split work across independent output elements, so both
// flavours produce bit-identical results for any thread count; the reference
// stays around for the equivalence tests and the benchmark tool.

bool parallel_enabled();
void set_parallel(bool on);

namespace serial {
void matmul(const double* A, const double* B, double* C, int m, int k, int n);
// C = A^T * B, A is k x m, B is k x n, C is m x n.
void matmul_tn(const double* A, const double* B, double* C, int m, int k, int n);
// C = A * B^T, A is m x k, B is n x k, C is m x n.
void matmul_nt(const double* A, const double* B, double* C, int m, int k, int n);
void ew_add(const double* a, const double* b, double* y, size_t n);
void ew_sub(const double* a, const double* b, double* y, size_t n);
void ew_mul(const double* a, const double* b, double* y, size_t n);
void ew_tanh(const double* x, double* y, size_t n);
void ew_sigmoid(const double* x, double* y, size_t n);
void row_softmax(const double* x, double* y, int rows, int cols);
}  // namespace serial

namespace omp {
void matmul(const double* A, const double* B, double* C, int m, int k, int n);
void matmul_tn(const double* A, const double* B, double* C, int m, int k, int n);
void matmul_nt(const double* A, const double* B, double* C, int m, int k, int n);
void ew_add(const double* a, const double* b, double* y, size_t n);
void ew_sub(const double* a, const double* b, double* y, size_t n);
void ew_mul(const double* a, const double* b, double* y, size_t n);
void ew_tanh(const double* x, double* y, size_t n);
void ew_sigmoid(const double* x, double* y, size_t n);
void row_softmax(const double* x, double* y, int rows, int cols);
}  // namespace omp

// Dispatchers: OpenMP path when enabled and the problem is big enough to pay
// for the fork, serial otherwise. Same bits either way.
void matmul(const double* A, const double* B, double* C, int m, int k, int n);
void matmul_tn(const double* A, const double* B, double* C, int m, int k, int n);
void matmul_nt(const double* A, const double* B, double* C, int m, int k, int n);
void ew_add(const double* a, const double* b, double* y, size_t n);
void ew_sub(const double* a, const double* b, double* y, size_t n);
void ew_mul(const double* a, const double* b, double* y, size_t n);
void ew_tanh(const double* x, double* y, size_t n);
void ew_sigmoid(const double* x, double* y, size_t n);
void row_softmax(const double* x, double* y, int rows, int cols);

// Mat convenience wrappers.
Mat matmul(const Mat& A, const Mat& B);
Mat matmul_tn(const Mat& A, const Mat& B);
Mat matmul_nt(const Mat& A, const Mat& B);
Mat row_softmax(const Mat& x);

}  // namespace cvid::kernels
