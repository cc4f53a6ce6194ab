#include "dqe/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "dqe/kernels/edt.hpp"

namespace dqe {

void PairedSeries::validate() const {
  if (predictions.size() != references.size())
    throw LengthMismatch("series length mismatch: " + std::to_string(predictions.size()) + " vs " +
                         std::to_string(references.size()));
  if (predictions.empty()) throw EmptySeries("empty paired series");
  for (size_t i = 0; i < predictions.size(); ++i)
    if (!std::isfinite(predictions[i]) || !std::isfinite(references[i]))
      throw EmptySeries("non-finite value in paired series at index " + std::to_string(i));
}

double mae(const PairedSeries& s) {
  s.validate();
  double sum = 0;
  for (size_t i = 0; i < s.size(); ++i) sum += std::fabs(s.predictions[i] - s.references[i]);
  return sum / static_cast<double>(s.size());
}

double rmse(const PairedSeries& s) {
  s.validate();
  double sum = 0;
  for (size_t i = 0; i < s.size(); ++i) {
    const double d = s.predictions[i] - s.references[i];
    sum += d * d;
  }
  return std::sqrt(sum / static_cast<double>(s.size()));
}

double pearson_r(const PairedSeries& s) {
  s.validate();
  const size_t n = s.size();
  double mp = 0, mr = 0;
  for (size_t i = 0; i < n; ++i) {
    mp += s.predictions[i];
    mr += s.references[i];
  }
  mp /= static_cast<double>(n);
  mr /= static_cast<double>(n);
  double spp = 0, srr = 0, spr = 0;
  for (size_t i = 0; i < n; ++i) {
    const double dp = s.predictions[i] - mp;
    const double dr = s.references[i] - mr;
    spp += dp * dp;
    srr += dr * dr;
    spr += dp * dr;
  }
  if (spp <= 0 || srr <= 0) throw ZeroVariance("pearson_r: a series has zero variance");
  return spr / std::sqrt(spp * srr);
}

BlandAltman bland_altman(const PairedSeries& s) {
  s.validate();
  const size_t n = s.size();
  double mean = 0;
  for (size_t i = 0; i < n; ++i) mean += s.predictions[i] - s.references[i];
  mean /= static_cast<double>(n);
  double ss = 0;
  for (size_t i = 0; i < n; ++i) {
    const double d = (s.predictions[i] - s.references[i]) - mean;
    ss += d * d;
  }
  const double sd = n > 1 ? std::sqrt(ss / static_cast<double>(n - 1)) : 0.0;
  return {mean, sd, mean - 1.96 * sd, mean + 1.96 * sd};
}

namespace {

void check_same_grid(const TissueSeg& a, const TissueSeg& b) {
  if (!a.same_shape(b.nx, b.ny, b.nz))
    throw ShapeMismatch("mask shapes differ: " + std::to_string(a.nx) + "x" + std::to_string(a.ny) +
                        "x" + std::to_string(a.nz) + " vs " + std::to_string(b.nx) + "x" +
                        std::to_string(b.ny) + "x" + std::to_string(b.nz));
}

}  // namespace

double dice(const TissueSeg& a, const TissueSeg& b) {
  check_same_grid(a, b);
  size_t na = 0, nb = 0, inter = 0;
  for (size_t i = 0; i < a.data.size(); ++i) {
    const bool fa = a.data[i] != 0;
    const bool fb = b.data[i] != 0;
    na += fa;
    nb += fb;
    inter += fa && fb;
  }
  if (na + nb == 0) return 1.0;  // perfect agreement on absence
  return 2.0 * static_cast<double>(inter) / static_cast<double>(na + nb);
}

namespace {

// Boundary = foreground voxel with a background face neighbor; out-of-grid
// is background. Single-slice grids use the 8-neighborhood in plane.
std::vector<uint8_t> boundary_mask(const TissueSeg& m) {
  std::vector<uint8_t> out(m.data.size(), 0);
  const bool planar = m.nz == 1;
  size_t i = 0;
  for (int z = 0; z < m.nz; ++z)
    for (int y = 0; y < m.ny; ++y)
      for (int x = 0; x < m.nx; ++x, ++i) {
        if (m.data[i] == 0) continue;
        auto bg = [&](int xx, int yy, int zz) {
          if (xx < 0 || xx >= m.nx || yy < 0 || yy >= m.ny || zz < 0 || zz >= m.nz) return true;
          return m.at(xx, yy, zz) == 0;
        };
        bool edge = false;
        if (planar) {
          for (int dy = -1; dy <= 1 && !edge; ++dy)
            for (int dx = -1; dx <= 1 && !edge; ++dx) {
              if (dx == 0 && dy == 0) continue;
              edge = bg(x + dx, y + dy, z);
            }
        } else {
          edge = bg(x - 1, y, z) || bg(x + 1, y, z) || bg(x, y - 1, z) || bg(x, y + 1, z) ||
                 bg(x, y, z - 1) || bg(x, y, z + 1);
        }
        out[i] = edge ? 1 : 0;
      }
  return out;
}

// Squared distances (mm^2) from every voxel to the nearest boundary voxel.
std::vector<double> boundary_sqdist(const TissueSeg& m, const std::vector<uint8_t>& boundary) {
  std::vector<double> f(m.data.size());
  for (size_t i = 0; i < f.size(); ++i) f[i] = boundary[i] ? 0.0 : kernels::kEdtInf;
  kernels::edt_3d(f, m.nx, m.ny, m.nz, m.sx, m.sy, m.sz);
  return f;
}

}  // namespace

double surface_dice(const TissueSeg& a, const TissueSeg& b, double tolerance_mm) {
  check_same_grid(a, b);
  if (tolerance_mm < 0) throw NegativeTolerance("surface_dice: negative tolerance");
  const double tol = 1e-4;
  if (std::fabs(a.sx - b.sx) > tol || std::fabs(a.sy - b.sy) > tol || std::fabs(a.sz - b.sz) > tol)
    throw ShapeMismatch("surface_dice: spacings differ");

  const auto ba = boundary_mask(a);
  const auto bb = boundary_mask(b);
  size_t na = 0, nb = 0;
  for (uint8_t v : ba) na += v;
  for (uint8_t v : bb) nb += v;
  if (na == 0 && nb == 0) return 1.0;
  if (na == 0 || nb == 0) return 0.0;

  const auto da = boundary_sqdist(a, ba);
  const auto db = boundary_sqdist(b, bb);
  const double tol2 = tolerance_mm * tolerance_mm;
  // a voxel center exactly at the tolerance counts as within it
  const double eps = 1e-9;
  size_t hits_a = 0, hits_b = 0;
  for (size_t i = 0; i < ba.size(); ++i) {
    if (ba[i] && db[i] <= tol2 + eps) ++hits_a;
    if (bb[i] && da[i] <= tol2 + eps) ++hits_b;
  }
  return static_cast<double>(hits_a + hits_b) / static_cast<double>(na + nb);
}

bool linear_fit(const PairedSeries& s, double& slope, double& intercept) {
  const size_t n = s.size();
  double mx = 0, my = 0;
  for (size_t i = 0; i < n; ++i) {
    mx += s.predictions[i];
    my += s.references[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0, sxy = 0;
  for (size_t i = 0; i < n; ++i) {
    sxx += (s.predictions[i] - mx) * (s.predictions[i] - mx);
    sxy += (s.predictions[i] - mx) * (s.references[i] - my);
  }
  if (sxx <= 0) return false;
  slope = sxy / sxx;
  intercept = my - slope * mx;
  return true;
}

void scatter_export(const PairedSeries& s, const std::string& path) {
  s.validate();
  const std::string tmp = path + ".tmp";
  {
    std::ofstream f(tmp);
    if (!f) throw IOFailure("cannot create: " + tmp);
    f << "kind,a,b\n";
    char buf[96];
    for (size_t i = 0; i < s.size(); ++i) {
      std::snprintf(buf, sizeof(buf), "point,%.9g,%.9g\n", s.predictions[i], s.references[i]);
      f << buf;
    }
    double slope, intercept;
    if (linear_fit(s, slope, intercept)) {
      std::snprintf(buf, sizeof(buf), "fit,%.9g,%.9g\n", slope, intercept);
      f << buf;
    } else {
      f << "fit,degenerate,degenerate\n";
    }
    if (!f.good()) throw IOFailure("write failed: " + path);
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IOFailure("cannot move into place: " + path);
}

}  // namespace dqe
