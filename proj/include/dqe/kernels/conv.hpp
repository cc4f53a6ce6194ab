#pragma once

#include <cstddef>

namespace dqe::kernels {

inline int conv_out_dim(int in, int k, int stride, int pad) {
  return (in + 2 * pad - k) / stride + 1;
}

// Unfold one image [c, h, w] into columns col[c*kh*kw, oh*ow]; zero padding.
template <class T>
void im2col_serial(const T* x, int c, int h, int w, int kh, int kw, int stride, int pad, T* col) {
  const int oh = conv_out_dim(h, kh, stride, pad);
  const int ow = conv_out_dim(w, kw, stride, pad);
  const size_t ncols = static_cast<size_t>(oh) * ow;
  for (int ci = 0; ci < c; ++ci) {
    for (int ky = 0; ky < kh; ++ky) {
      for (int kx = 0; kx < kw; ++kx) {
        T* dst = col + (static_cast<size_t>(ci) * kh * kw + static_cast<size_t>(ky) * kw + kx) * ncols;
        for (int oy = 0; oy < oh; ++oy) {
          const int y = oy * stride - pad + ky;
          for (int ox = 0; ox < ow; ++ox) {
            const int xx = ox * stride - pad + kx;
            dst[static_cast<size_t>(oy) * ow + ox] =
                (y >= 0 && y < h && xx >= 0 && xx < w)
                    ? x[(static_cast<size_t>(ci) * h + y) * w + xx]
                    : T(0);
          }
        }
      }
    }
  }
}

template <class T>
void im2col(const T* x, int c, int h, int w, int kh, int kw, int stride, int pad, T* col) {
  const int oh = conv_out_dim(h, kh, stride, pad);
  const int ow = conv_out_dim(w, kw, stride, pad);
  const size_t ncols = static_cast<size_t>(oh) * ow;
  const int rows = c * kh * kw;
#pragma omp parallel for schedule(static)
  for (int r = 0; r < rows; ++r) {
    const int ci = r / (kh * kw);
    const int ky = (r / kw) % kh;
    const int kx = r % kw;
    T* dst = col + static_cast<size_t>(r) * ncols;
    for (int oy = 0; oy < oh; ++oy) {
      const int y = oy * stride - pad + ky;
      for (int ox = 0; ox < ow; ++ox) {
        const int xx = ox * stride - pad + kx;
        dst[static_cast<size_t>(oy) * ow + ox] =
            (y >= 0 && y < h && xx >= 0 && xx < w)
                ? x[(static_cast<size_t>(ci) * h + y) * w + xx]
                : T(0);
      }
    }
  }
}

// Fold columns back into an image, summing overlaps. Gather formulation:
// each destination pixel is written by exactly one iteration, so the result
// is deterministic under parallel execution.
template <class T>
void col2im_serial(const T* col, int c, int h, int w, int kh, int kw, int stride, int pad, T* x) {
  const int oh = conv_out_dim(h, kh, stride, pad);
  const int ow = conv_out_dim(w, kw, stride, pad);
  const size_t ncols = static_cast<size_t>(oh) * ow;
  for (int ci = 0; ci < c; ++ci) {
    for (int y = 0; y < h; ++y) {
      for (int xx = 0; xx < w; ++xx) {
        T sum = T(0);
        for (int ky = 0; ky < kh; ++ky) {
          const int ty = y + pad - ky;
          if (ty < 0 || ty % stride != 0) continue;
          const int oy = ty / stride;
          if (oy >= oh) continue;
          for (int kx = 0; kx < kw; ++kx) {
            const int tx = xx + pad - kx;
            if (tx < 0 || tx % stride != 0) continue;
            const int ox = tx / stride;
            if (ox >= ow) continue;
            sum += col[(static_cast<size_t>(ci) * kh * kw + static_cast<size_t>(ky) * kw + kx) * ncols +
                       static_cast<size_t>(oy) * ow + ox];
          }
        }
        x[(static_cast<size_t>(ci) * h + y) * w + xx] = sum;
      }
    }
  }
}

template <class T>
void col2im(const T* col, int c, int h, int w, int kh, int kw, int stride, int pad, T* x) {
  const int oh = conv_out_dim(h, kh, stride, pad);
  const int ow = conv_out_dim(w, kw, stride, pad);
  const size_t ncols = static_cast<size_t>(oh) * ow;
#pragma omp parallel for schedule(static)
  for (int ci = 0; ci < c; ++ci) {
    for (int y = 0; y < h; ++y) {
      for (int xx = 0; xx < w; ++xx) {
        T sum = T(0);
        for (int ky = 0; ky < kh; ++ky) {
          const int ty = y + pad - ky;
          if (ty < 0 || ty % stride != 0) continue;
          const int oy = ty / stride;
          if (oy >= oh) continue;
          for (int kx = 0; kx < kw; ++kx) {
            const int tx = xx + pad - kx;
            if (tx < 0 || tx % stride != 0) continue;
            const int ox = tx / stride;
            if (ox >= ow) continue;
            sum += col[(static_cast<size_t>(ci) * kh * kw + static_cast<size_t>(ky) * kw + kx) * ncols +
                       static_cast<size_t>(oy) * ow + ox];
          }
        }
        x[(static_cast<size_t>(ci) * h + y) * w + xx] = sum;
      }
    }
  }
}

// Batched im2col over images stored [n, c, h, w]: sample s fills the column
// block [s*oh*ow, (s+1)*oh*ow), so col has shape [c*kh*kw, n*oh*ow] and one
// GEMM covers the whole chunk.
template <class T>
void im2col_batch(const T* x, int n, int c, int h, int w, int kh, int kw, int stride, int pad,
                  T* col) {
  const int oh = conv_out_dim(h, kh, stride, pad);
  const int ow = conv_out_dim(w, kw, stride, pad);
  const size_t per = static_cast<size_t>(oh) * ow;
  const size_t ncols = per * static_cast<size_t>(n);
  const int rows = c * kh * kw;
  const size_t img = static_cast<size_t>(c) * h * w;
#pragma omp parallel for schedule(static)
  for (int r = 0; r < rows; ++r) {
    const int ci = r / (kh * kw);
    const int ky = (r / kw) % kh;
    const int kx = r % kw;
    T* dst = col + static_cast<size_t>(r) * ncols;
    for (int s = 0; s < n; ++s) {
      const T* src = x + static_cast<size_t>(s) * img + static_cast<size_t>(ci) * h * w;
      T* d = dst + static_cast<size_t>(s) * per;
      for (int oy = 0; oy < oh; ++oy) {
        const int y = oy * stride - pad + ky;
        for (int ox = 0; ox < ow; ++ox) {
          const int xx = ox * stride - pad + kx;
          d[static_cast<size_t>(oy) * ow + ox] =
              (y >= 0 && y < h && xx >= 0 && xx < w) ? src[static_cast<size_t>(y) * w + xx] : T(0);
        }
      }
    }
  }
}

// Inverse of im2col_batch (gather form, overlaps summed); writes x.
template <class T>
void col2im_batch(const T* col, int n, int c, int h, int w, int kh, int kw, int stride, int pad,
                  T* x) {
  const int oh = conv_out_dim(h, kh, stride, pad);
  const int ow = conv_out_dim(w, kw, stride, pad);
  const size_t per = static_cast<size_t>(oh) * ow;
  const size_t ncols = per * static_cast<size_t>(n);
  const size_t img = static_cast<size_t>(c) * h * w;
  const int planes = n * c;
#pragma omp parallel for schedule(static)
  for (int p = 0; p < planes; ++p) {
    const int s = p / c;
    const int ci = p % c;
    T* dst = x + static_cast<size_t>(s) * img + static_cast<size_t>(ci) * h * w;
    for (int y = 0; y < h; ++y) {
      for (int xx = 0; xx < w; ++xx) {
        T sum = T(0);
        for (int ky = 0; ky < kh; ++ky) {
          const int ty = y + pad - ky;
          if (ty < 0 || ty % stride != 0) continue;
          const int oy = ty / stride;
          if (oy >= oh) continue;
          for (int kx = 0; kx < kw; ++kx) {
            const int tx = xx + pad - kx;
            if (tx < 0 || tx % stride != 0) continue;
            const int ox = tx / stride;
            if (ox >= ow) continue;
            const size_t row = static_cast<size_t>(ci) * kh * kw + static_cast<size_t>(ky) * kw + kx;
            sum += col[row * ncols + static_cast<size_t>(s) * per + static_cast<size_t>(oy) * ow + ox];
          }
        }
        dst[static_cast<size_t>(y) * w + xx] = sum;
      }
    }
  }
}

}  // namespace dqe::kernels
