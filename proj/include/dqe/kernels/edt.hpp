#pragma once

#include <limits>
#include <vector>

namespace dqe::kernels {

inline constexpr double kEdtInf = std::numeric_limits<double>::max() / 16;

namespace detail {

// Felzenszwalb-Huttenlocher 1D squared distance transform along a strided
// line, with physical sample positions i*spacing (millimeters).
inline void edt_1d_line(double* f, int n, size_t stride, double spacing, double* d, int* v,
                        double* z) {
  int k = 0;
  v[0] = 0;
  z[0] = -kEdtInf;
  z[1] = kEdtInf;
  auto fx = [&](int i) { return f[static_cast<size_t>(i) * stride]; };
  auto pos = [&](int i) { return i * spacing; };
  for (int q = 1; q < n; ++q) {
    double s;
    while (true) {
      const int p = v[k];
      s = ((fx(q) + pos(q) * pos(q)) - (fx(p) + pos(p) * pos(p))) / (2 * pos(q) - 2 * pos(p));
      if (s <= z[k]) {
        --k;
        if (k < 0) break;
      } else {
        break;
      }
    }
    ++k;
    v[k] = q;
    z[k] = s;
    z[k + 1] = kEdtInf;
  }
  k = 0;
  for (int q = 0; q < n; ++q) {
    while (z[k + 1] < pos(q)) ++k;
    const double dx = pos(q) - pos(v[k]);
    d[q] = dx * dx + fx(v[k]);
  }
  for (int q = 0; q < n; ++q) f[static_cast<size_t>(q) * stride] = d[q];
}

}  // namespace detail

// Exact squared Euclidean distance transform on a 3D grid with anisotropic
// spacing. On entry f holds 0 at feature voxels and kEdtInf elsewhere; on
// exit it holds squared distances in mm^2. Lines are independent, so the
// parallel variant matches the serial one bit for bit.
inline void edt_3d_serial(std::vector<double>& f, int nx, int ny, int nz, double sx, double sy,
                          double sz) {
  const int nmax = std::max(nx, std::max(ny, nz));
  std::vector<double> d(nmax), z(nmax + 1);
  std::vector<int> v(nmax);
  // pass along x
  for (int zz = 0; zz < nz; ++zz)
    for (int y = 0; y < ny; ++y)
      detail::edt_1d_line(f.data() + static_cast<size_t>(zz) * nx * ny + static_cast<size_t>(y) * nx,
                          nx, 1, sx, d.data(), v.data(), z.data());
  // pass along y
  for (int zz = 0; zz < nz; ++zz)
    for (int x = 0; x < nx; ++x)
      detail::edt_1d_line(f.data() + static_cast<size_t>(zz) * nx * ny + x, ny, nx, sy, d.data(),
                          v.data(), z.data());
  // pass along z
  for (int y = 0; y < ny; ++y)
    for (int x = 0; x < nx; ++x)
      detail::edt_1d_line(f.data() + static_cast<size_t>(y) * nx + x, nz,
                          static_cast<size_t>(nx) * ny, sz, d.data(), v.data(), z.data());
}

inline void edt_3d(std::vector<double>& f, int nx, int ny, int nz, double sx, double sy, double sz) {
  const int nmax = std::max(nx, std::max(ny, nz));
#pragma omp parallel
  {
    std::vector<double> d(nmax), z(nmax + 1);
    std::vector<int> v(nmax);
#pragma omp for schedule(static) collapse(2)
    for (int zz = 0; zz < nz; ++zz)
      for (int y = 0; y < ny; ++y)
        detail::edt_1d_line(
            f.data() + static_cast<size_t>(zz) * nx * ny + static_cast<size_t>(y) * nx, nx, 1, sx,
            d.data(), v.data(), z.data());
#pragma omp for schedule(static) collapse(2)
    for (int zz = 0; zz < nz; ++zz)
      for (int x = 0; x < nx; ++x)
        detail::edt_1d_line(f.data() + static_cast<size_t>(zz) * nx * ny + x, ny, nx, sy, d.data(),
                            v.data(), z.data());
#pragma omp for schedule(static) collapse(2)
    for (int y = 0; y < ny; ++y)
      for (int x = 0; x < nx; ++x)
        detail::edt_1d_line(f.data() + static_cast<size_t>(y) * nx + x, nz,
                            static_cast<size_t>(nx) * ny, sz, d.data(), v.data(), z.data());
  }
}

}  // namespace dqe::kernels
