#pragma once

#include <complex>
#include <vector>

#include "dqe/common.hpp"

namespace dqe::kernels {

using cplx = std::complex<double>;

namespace detail {

inline bool is_pow2(int n) { return n > 0 && (n & (n - 1)) == 0; }

// In-place iterative radix-2 Cooley-Tukey; n must be a power of two.
inline void fft_pow2(cplx* x, int n, bool inverse) {
  for (int i = 1, j = 0; i < n; ++i) {
    int bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(x[i], x[j]);
  }
  for (int len = 2; len <= n; len <<= 1) {
    const double ang = (inverse ? 2.0 : -2.0) * dqe::kPi / len;
    const cplx wlen(std::cos(ang), std::sin(ang));
    for (int i = 0; i < n; i += len) {
      cplx w(1.0, 0.0);
      for (int k = 0; k < len / 2; ++k) {
        const cplx u = x[i + k];
        const cplx v = x[i + k + len / 2] * w;
        x[i + k] = u + v;
        x[i + k + len / 2] = u - v;
        w *= wlen;
      }
    }
  }
}

}  // namespace detail

// 1D DFT of arbitrary length: radix-2 when possible, Bluestein otherwise.
// The inverse transform includes the 1/n scaling.
inline void fft_1d(cplx* x, int n, bool inverse) {
  if (n <= 1) return;
  if (detail::is_pow2(n)) {
    detail::fft_pow2(x, n, inverse);
  } else {
    // Bluestein: express the DFT as a circular convolution of length m >= 2n-1.
    int m = 1;
    while (m < 2 * n - 1) m <<= 1;
    std::vector<cplx> w(n), a(m, cplx(0, 0)), b(m, cplx(0, 0));
    const double sign = inverse ? 1.0 : -1.0;
    for (int k = 0; k < n; ++k) {
      // exp(sign * i*pi*k^2/n); reduce k^2 mod 2n to keep the angle accurate
      const long long k2 = (1LL * k * k) % (2LL * n);
      const double ang = sign * dqe::kPi * static_cast<double>(k2) / n;
      w[k] = cplx(std::cos(ang), std::sin(ang));
      a[k] = x[k] * w[k];
      b[k] = std::conj(w[k]);
      if (k > 0) b[m - k] = std::conj(w[k]);
    }
    detail::fft_pow2(a.data(), m, false);
    detail::fft_pow2(b.data(), m, false);
    for (int i = 0; i < m; ++i) a[i] *= b[i];
    detail::fft_pow2(a.data(), m, true);
    for (int i = 0; i < m; ++i) a[i] /= m;
    for (int k = 0; k < n; ++k) x[k] = a[k] * w[k];
  }
  if (inverse)
    for (int i = 0; i < n; ++i) x[i] /= n;
}

// 2D DFT over a row-major h x w grid: rows first, then columns.
inline void fft_2d_serial(cplx* x, int h, int w, bool inverse) {
  for (int y = 0; y < h; ++y) fft_1d(x + static_cast<size_t>(y) * w, w, inverse);
  std::vector<cplx> col(h);
  for (int cx = 0; cx < w; ++cx) {
    for (int y = 0; y < h; ++y) col[y] = x[static_cast<size_t>(y) * w + cx];
    fft_1d(col.data(), h, inverse);
    for (int y = 0; y < h; ++y) x[static_cast<size_t>(y) * w + cx] = col[y];
  }
}

inline void fft_2d(cplx* x, int h, int w, bool inverse) {
#pragma omp parallel for schedule(static)
  for (int y = 0; y < h; ++y) fft_1d(x + static_cast<size_t>(y) * w, w, inverse);
#pragma omp parallel for schedule(static)
  for (int cx = 0; cx < w; ++cx) {
    std::vector<cplx> col(h);
    for (int y = 0; y < h; ++y) col[y] = x[static_cast<size_t>(y) * w + cx];
    fft_1d(col.data(), h, inverse);
    for (int y = 0; y < h; ++y) x[static_cast<size_t>(y) * w + cx] = col[y];
  }
}

}  // namespace dqe::kernels
