#pragma once

#include <cmath>
#include <cstddef>

namespace dqe::kernels {

// Output-to-input 2D affine map: (y, x) -> (m00*x + m01*y + m02, row part).
// Row-major pixel addressing, x = column, y = row.
struct Affine2 {
  double a00 = 1, a01 = 0, a02 = 0;  // x_src = a00*x + a01*y + a02
  double a10 = 0, a11 = 1, a12 = 0;  // y_src = a10*x + a11*y + a12
};

namespace detail {

// Bilinear sample with zero fill outside the grid. At exact integer
// coordinates the zero-weight terms vanish, so the sample reproduces the
// source value bit-exactly.
template <class T>
inline T sample_bilinear(const T* src, int h, int w, double ys, double xs) {
  const int x0 = static_cast<int>(std::floor(xs));
  const int y0 = static_cast<int>(std::floor(ys));
  const double fx = xs - x0;
  const double fy = ys - y0;
  auto px = [&](int y, int x) -> double {
    return (y >= 0 && y < h && x >= 0 && x < w) ? static_cast<double>(src[static_cast<size_t>(y) * w + x])
                                                : 0.0;
  };
  const double v = (1.0 - fy) * ((1.0 - fx) * px(y0, x0) + fx * px(y0, x0 + 1)) +
                   fy * ((1.0 - fx) * px(y0 + 1, x0) + fx * px(y0 + 1, x0 + 1));
  return static_cast<T>(v);
}

template <class T>
inline T sample_nearest(const T* src, int h, int w, double ys, double xs) {
  const int x = static_cast<int>(std::lround(xs));
  const int y = static_cast<int>(std::lround(ys));
  return (y >= 0 && y < h && x >= 0 && x < w) ? src[static_cast<size_t>(y) * w + x] : T(0);
}

}  // namespace detail

template <class T>
void warp_affine_serial(const T* src, int h, int w, const Affine2& inv, T* dst, bool nearest) {
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double xs = inv.a00 * x + inv.a01 * y + inv.a02;
      const double ys = inv.a10 * x + inv.a11 * y + inv.a12;
      dst[static_cast<size_t>(y) * w + x] = nearest ? detail::sample_nearest(src, h, w, ys, xs)
                                                    : detail::sample_bilinear(src, h, w, ys, xs);
    }
  }
}

template <class T>
void warp_affine(const T* src, int h, int w, const Affine2& inv, T* dst, bool nearest) {
#pragma omp parallel for schedule(static)
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double xs = inv.a00 * x + inv.a01 * y + inv.a02;
      const double ys = inv.a10 * x + inv.a11 * y + inv.a12;
      dst[static_cast<size_t>(y) * w + x] = nearest ? detail::sample_nearest(src, h, w, ys, xs)
                                                    : detail::sample_bilinear(src, h, w, ys, xs);
    }
  }
}

// Dense displacement warp: dst(y,x) = src(y + dy(y,x), x + dx(y,x)).
template <class T>
void warp_field_serial(const T* src, int h, int w, const float* dy, const float* dx, T* dst,
                       bool nearest) {
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const size_t i = static_cast<size_t>(y) * w + x;
      const double ys = y + dy[i];
      const double xs = x + dx[i];
      dst[i] = nearest ? detail::sample_nearest(src, h, w, ys, xs)
                       : detail::sample_bilinear(src, h, w, ys, xs);
    }
  }
}

template <class T>
void warp_field(const T* src, int h, int w, const float* dy, const float* dx, T* dst, bool nearest) {
#pragma omp parallel for schedule(static)
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const size_t i = static_cast<size_t>(y) * w + x;
      const double ys = y + dy[i];
      const double xs = x + dx[i];
      dst[i] = nearest ? detail::sample_nearest(src, h, w, ys, xs)
                       : detail::sample_bilinear(src, h, w, ys, xs);
    }
  }
}

// Half-pixel-center resize. Scale 1 maps every pixel onto itself exactly.
template <class T>
void resize_serial(const T* src, int h, int w, T* dst, int oh, int ow, bool nearest) {
  const double sy = static_cast<double>(h) / oh;
  const double sx = static_cast<double>(w) / ow;
  for (int y = 0; y < oh; ++y) {
    const double ys = (y + 0.5) * sy - 0.5;
    for (int x = 0; x < ow; ++x) {
      const double xs = (x + 0.5) * sx - 0.5;
      dst[static_cast<size_t>(y) * ow + x] =
          nearest ? detail::sample_nearest(src, h, w, std::max(0.0, std::min(ys, h - 1.0)),
                                           std::max(0.0, std::min(xs, w - 1.0)))
                  : detail::sample_bilinear(src, h, w, std::max(0.0, std::min(ys, h - 1.0)),
                                            std::max(0.0, std::min(xs, w - 1.0)));
    }
  }
}

template <class T>
void resize(const T* src, int h, int w, T* dst, int oh, int ow, bool nearest) {
  const double sy = static_cast<double>(h) / oh;
  const double sx = static_cast<double>(w) / ow;
#pragma omp parallel for schedule(static)
  for (int y = 0; y < oh; ++y) {
    const double ys = (y + 0.5) * sy - 0.5;
    for (int x = 0; x < ow; ++x) {
      const double xs = (x + 0.5) * sx - 0.5;
      dst[static_cast<size_t>(y) * ow + x] =
          nearest ? detail::sample_nearest(src, h, w, std::max(0.0, std::min(ys, h - 1.0)),
                                           std::max(0.0, std::min(xs, w - 1.0)))
                  : detail::sample_bilinear(src, h, w, std::max(0.0, std::min(ys, h - 1.0)),
                                            std::max(0.0, std::min(xs, w - 1.0)));
    }
  }
}

}  // namespace dqe::kernels
