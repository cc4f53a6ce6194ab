#pragma once

#include <cstddef>

namespace dqe::kernels {

// Row-major GEMM: C = alpha * op(A) * op(B) + beta * C.
// op(A) is m x k, op(B) is k x n, C is m x n; the stored matrix is the
// transpose of op() when the corresponding flag is set.
//
// Both variants compute every C element with the same serial accumulation
// order, so gemm() output is bit-identical to gemm_serial() for any thread
// count. The parallel variant splits work over rows of C only.

namespace detail {

template <class T>
inline void gemm_row_nn(int i, int n, int k, T alpha, const T* a, const T* b, T beta, T* c) {
  T* crow = c + static_cast<size_t>(i) * n;
  if (beta == T(0)) {
    for (int j = 0; j < n; ++j) crow[j] = T(0);
  } else if (beta != T(1)) {
    for (int j = 0; j < n; ++j) crow[j] *= beta;
  }
  const T* arow = a + static_cast<size_t>(i) * k;
  for (int kk = 0; kk < k; ++kk) {
    const T av = alpha * arow[kk];
    const T* brow = b + static_cast<size_t>(kk) * n;
#pragma omp simd
    for (int j = 0; j < n; ++j) crow[j] += av * brow[j];
  }
}

template <class T>
inline void gemm_row_tn(int i, int m, int n, int k, T alpha, const T* a, const T* b, T beta, T* c) {
  T* crow = c + static_cast<size_t>(i) * n;
  if (beta == T(0)) {
    for (int j = 0; j < n; ++j) crow[j] = T(0);
  } else if (beta != T(1)) {
    for (int j = 0; j < n; ++j) crow[j] *= beta;
  }
  for (int kk = 0; kk < k; ++kk) {
    const T av = alpha * a[static_cast<size_t>(kk) * m + i];
    const T* brow = b + static_cast<size_t>(kk) * n;
#pragma omp simd
    for (int j = 0; j < n; ++j) crow[j] += av * brow[j];
  }
}

template <class T>
inline void gemm_row_nt(int i, int n, int k, T alpha, const T* a, const T* b, T beta, T* c) {
  T* crow = c + static_cast<size_t>(i) * n;
  const T* arow = a + static_cast<size_t>(i) * k;
  for (int j = 0; j < n; ++j) {
    const T* brow = b + static_cast<size_t>(j) * k;
    T sum = T(0);
#pragma omp simd reduction(+ : sum)
    for (int kk = 0; kk < k; ++kk) sum += arow[kk] * brow[kk];
    crow[j] = alpha * sum + (beta == T(0) ? T(0) : beta * crow[j]);
  }
}

template <class T>
inline void gemm_row_tt(int i, int m, int n, int k, T alpha, const T* a, const T* b, T beta, T* c) {
  T* crow = c + static_cast<size_t>(i) * n;
  for (int j = 0; j < n; ++j) {
    const T* brow = b + static_cast<size_t>(j) * k;
    T sum = T(0);
    for (int kk = 0; kk < k; ++kk) sum += a[static_cast<size_t>(kk) * m + i] * brow[kk];
    crow[j] = alpha * sum + (beta == T(0) ? T(0) : beta * crow[j]);
  }
}

template <class T>
inline void gemm_row(bool trans_a, bool trans_b, int i, int m, int n, int k, T alpha, const T* a,
                     const T* b, T beta, T* c) {
  if (!trans_a && !trans_b)
    gemm_row_nn(i, n, k, alpha, a, b, beta, c);
  else if (trans_a && !trans_b)
    gemm_row_tn(i, m, n, k, alpha, a, b, beta, c);
  else if (!trans_a && trans_b)
    gemm_row_nt(i, n, k, alpha, a, b, beta, c);
  else
    gemm_row_tt(i, m, n, k, alpha, a, b, beta, c);
}

}  // namespace detail

template <class T>
void gemm_serial(bool trans_a, bool trans_b, int m, int n, int k, T alpha, const T* a, const T* b,
                 T beta, T* c) {
  for (int i = 0; i < m; ++i)
    detail::gemm_row(trans_a, trans_b, i, m, n, k, alpha, a, b, beta, c);
}

template <class T>
void gemm(bool trans_a, bool trans_b, int m, int n, int k, T alpha, const T* a, const T* b, T beta,
          T* c) {
#pragma omp parallel for schedule(static)
  for (int i = 0; i < m; ++i)
    detail::gemm_row(trans_a, trans_b, i, m, n, k, alpha, a, b, beta, c);
}

}  // namespace dqe::kernels
