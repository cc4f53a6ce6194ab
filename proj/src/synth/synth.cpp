#include "dqe/synth.hpp"

#include <algorithm>
#include <cmath>

#include "dqe/metrics.hpp"

namespace dqe {

void PhantomParams::validate() const {
  if (grid < 16) throw InvalidParams("phantom grid must be >= 16");
  if (!(spacing_mm > 0)) throw InvalidParams("phantom spacing must be positive");
  if (!(radius_min > 0) || radius_min > radius_max) throw InvalidParams("tumor radius range invalid");
  if (radius_max > grid / 3.0) throw InvalidParams("tumor radius too large for grid");
  if (!(core_frac > 0 && core_frac < rim_frac && rim_frac < 1.0))
    throw InvalidParams("shell fractions must satisfy 0 < core < rim < 1");
  if (lumpiness < 0 || lumpiness >= 0.9) throw InvalidParams("lumpiness outside [0, 0.9)");
  if (noise_sigma < 0) throw InvalidParams("noise sigma must be >= 0");
}

namespace {

struct DeformationMode {
  double amp;
  double fx, fy, fz;  // spatial frequencies
  double phase;
};

uint8_t shell_label(double rho, const PhantomParams& p) {
  if (rho <= p.core_frac) return kLabelNecrosis;
  if (rho <= p.rim_frac) return kLabelEnhancing;
  if (rho <= 1.0) return kLabelEdema;
  return kLabelBackground;
}

}  // namespace

Exam generate_phantom(const PhantomParams& params, uint64_t seed_offset) {
  params.validate();
  Rng rng(derive_seed(params.seed, seed_offset));
  const int n = params.grid;
  const double sp = params.spacing_mm;

  Exam exam;
  exam.seg = TissueSeg(n, n, n, sp, sp, sp);

  // head: axis-aligned ellipsoid filling most of the grid
  const double hx = 0.44 * n, hy = 0.46 * n, hz = 0.42 * n;
  const double hcx = (n - 1) / 2.0, hcy = (n - 1) / 2.0, hcz = (n - 1) / 2.0;

  // tumor: deformed ellipsoid placed inside the head with jitter
  const double radius = rng.uniform(params.radius_min, params.radius_max);
  const double jitter = 0.15 * n;
  const double tcx = hcx + rng.uniform(-jitter, jitter);
  const double tcy = hcy + rng.uniform(-jitter, jitter);
  const double tcz = hcz + rng.uniform(-jitter, jitter);
  const double ax = radius * rng.uniform(0.85, 1.15);
  const double ay = radius * rng.uniform(0.85, 1.15);
  const double az = radius * rng.uniform(0.85, 1.15);

  std::array<DeformationMode, 3> modes;
  for (auto& m : modes) {
    m.amp = params.lumpiness * rng.uniform(0.3, 1.0) / modes.size();
    m.fx = rng.uniform(0.5, 2.0);
    m.fy = rng.uniform(0.5, 2.0);
    m.fz = rng.uniform(0.5, 2.0);
    m.phase = rng.uniform(0.0, 2.0 * kPi);
  }

  std::vector<uint8_t> tissue(static_cast<size_t>(n) * n * n);  // 0 bg, 1 brain, 2.. per label
  size_t i = 0;
  for (int z = 0; z < n; ++z)
    for (int y = 0; y < n; ++y)
      for (int x = 0; x < n; ++x, ++i) {
        const double hu = (x - hcx) / hx, hv = (y - hcy) / hy, hw = (z - hcz) / hz;
        const bool in_head = hu * hu + hv * hv + hw * hw <= 1.0;
        if (!in_head) {
          tissue[i] = 0;
          continue;
        }
        const double tu = (x - tcx) / ax, tv = (y - tcy) / ay, tw = (z - tcz) / az;
        double rho = std::sqrt(tu * tu + tv * tv + tw * tw);
        if (rho < 1.6) {
          double bump = 0;
          for (const auto& m : modes)
            bump += m.amp * std::cos(m.fx * tu * kPi + m.fy * tv * kPi + m.fz * tw * kPi + m.phase);
          rho *= 1.0 + bump;
        }
        const uint8_t lbl = shell_label(rho, params);
        exam.seg.data[i] = lbl;
        tissue[i] = lbl == kLabelBackground ? 1
                    : lbl == kLabelNecrosis ? 2
                    : lbl == kLabelEdema    ? 3
                                            : 4;
      }

  auto render = [&](int modality) {
    Volume3D v(n, n, n, sp, sp, sp);
    // smooth gain gradient across the volume, mimicking coil shading
    const double gx = rng.uniform(-0.1, 0.1) / n;
    const double gy = rng.uniform(-0.1, 0.1) / n;
    const double gz = rng.uniform(-0.1, 0.1) / n;
    size_t j = 0;
    for (int z = 0; z < n; ++z)
      for (int y = 0; y < n; ++y)
        for (int x = 0; x < n; ++x, ++j) {
          const double mean = params.tissue_means[tissue[j]][static_cast<size_t>(modality)];
          const double gain = 1.0 + gx * (x - hcx) + gy * (y - hcy) + gz * (z - hcz);
          double val = mean * gain + rng.normal(0.0, params.noise_sigma);
          if (tissue[j] == 0) val = std::abs(rng.normal(0.0, params.noise_sigma * 0.25));
          v.data[j] = static_cast<float>(std::max(0.0, val));
        }
    return v;
  };
  exam.t1 = render(0);
  exam.t1c = render(1);
  exam.t2 = render(2);
  exam.flair = render(3);
  return exam;
}

namespace {

void carve_ball(TissueSeg& seg, double cx, double cy, double cz, double r, uint8_t value) {
  const int x0 = std::max(0, static_cast<int>(std::floor(cx - r)));
  const int x1 = std::min(seg.nx - 1, static_cast<int>(std::ceil(cx + r)));
  const int y0 = std::max(0, static_cast<int>(std::floor(cy - r)));
  const int y1 = std::min(seg.ny - 1, static_cast<int>(std::ceil(cy + r)));
  const int z0 = std::max(0, static_cast<int>(std::floor(cz - r)));
  const int z1 = std::min(seg.nz - 1, static_cast<int>(std::ceil(cz + r)));
  const double r2 = r * r;
  for (int z = z0; z <= z1; ++z)
    for (int y = y0; y <= y1; ++y)
      for (int x = x0; x <= x1; ++x) {
        const double dx = x - cx, dy = y - cy, dz = z - cz;
        if (dx * dx + dy * dy + dz * dz <= r2) seg.at(x, y, z) = value;
      }
}

// one sweep of boundary noise: foreground boundary voxels drop out, or
// background neighbors of the boundary get annexed
void boundary_noise(TissueSeg& seg, double flip_prob, Rng& rng) {
  const TissueSeg src = seg;
  for (int z = 0; z < src.nz; ++z)
    for (int y = 0; y < src.ny; ++y)
      for (int x = 0; x < src.nx; ++x) {
        const uint8_t v = src.at(x, y, z);
        auto neighbor = [&](int dx, int dy, int dz) -> uint8_t {
          const int xx = x + dx, yy = y + dy, zz = z + dz;
          if (xx < 0 || xx >= src.nx || yy < 0 || yy >= src.ny || zz < 0 || zz >= src.nz) return 0;
          return src.at(xx, yy, zz);
        };
        if (v != 0) {
          const bool edge = neighbor(-1, 0, 0) == 0 || neighbor(1, 0, 0) == 0 ||
                            neighbor(0, -1, 0) == 0 || neighbor(0, 1, 0) == 0 ||
                            neighbor(0, 0, -1) == 0 || neighbor(0, 0, 1) == 0;
          if (edge && rng.bernoulli(flip_prob)) seg.at(x, y, z) = 0;
        } else {
          uint8_t fg = 0;
          for (int d = 0; d < 6 && fg == 0; ++d) {
            static constexpr int off[6][3] = {{-1, 0, 0}, {1, 0, 0},  {0, -1, 0},
                                              {0, 1, 0},  {0, 0, -1}, {0, 0, 1}};
            fg = neighbor(off[d][0], off[d][1], off[d][2]);
          }
          if (fg != 0 && rng.bernoulli(flip_prob * 0.5)) seg.at(x, y, z) = fg;
        }
      }
}

}  // namespace

TissueSeg degrade_segmentation(const TissueSeg& seg, double severity, uint64_t seed) {
  if (!(severity >= 0.0 && severity <= 1.0))
    throw InvalidSeverity("severity must lie in [0,1], got " + std::to_string(severity));
  if (severity == 0.0) return seg;

  Rng rng(seed);
  TissueSeg out = seg;

  // rigid shift, up to ~40% of the grid at full severity
  const double max_shift = 0.12 * severity * (seg.nx + seg.ny + seg.nz) / 3.0;
  const int sx = static_cast<int>(std::lround(rng.uniform(-max_shift, max_shift)));
  const int sy = static_cast<int>(std::lround(rng.uniform(-max_shift, max_shift)));
  const int sz = static_cast<int>(std::lround(rng.uniform(-max_shift, max_shift)));
  if (sx != 0 || sy != 0 || sz != 0) {
    TissueSeg shifted(out.nx, out.ny, out.nz, out.sx, out.sy, out.sz);
    for (int z = 0; z < out.nz; ++z)
      for (int y = 0; y < out.ny; ++y)
        for (int x = 0; x < out.nx; ++x) {
          const int xs = x - sx, ys = y - sy, zs = z - sz;
          if (xs >= 0 && xs < out.nx && ys >= 0 && ys < out.ny && zs >= 0 && zs < out.nz)
            shifted.at(x, y, z) = out.at(xs, ys, zs);
        }
    out = std::move(shifted);
  }

  // boundary erosion/dilation noise
  const int sweeps = static_cast<int>(std::lround(3.0 * severity));
  for (int s = 0; s < sweeps; ++s) boundary_noise(out, 0.35 * severity + 0.25, rng);

  // punch holes
  const int holes = static_cast<int>(std::lround(4.0 * severity));
  for (int hcount = 0; hcount < holes; ++hcount) {
    const double r = rng.uniform(2.0, 2.0 + 5.0 * severity);
    carve_ball(out, rng.uniform(0.0, out.nx - 1.0), rng.uniform(0.0, out.ny - 1.0),
               rng.uniform(0.0, out.nz - 1.0), r, 0);
  }

  // spurious components
  const int blobs = static_cast<int>(std::lround(3.0 * severity));
  static constexpr uint8_t kClasses[3] = {kLabelNecrosis, kLabelEdema, kLabelEnhancing};
  for (int bcount = 0; bcount < blobs; ++bcount) {
    const double r = rng.uniform(1.5, 1.5 + 3.5 * severity);
    const uint8_t cls = kClasses[rng.uniform_int(0, 2)];
    carve_ball(out, rng.uniform(0.0, out.nx - 1.0), rng.uniform(0.0, out.ny - 1.0),
               rng.uniform(0.0, out.nz - 1.0), r, cls);
  }

  // class swap: relabel one tissue class
  if (rng.bernoulli(0.6 * severity)) {
    const uint8_t from = kClasses[rng.uniform_int(0, 2)];
    const uint8_t to = kClasses[rng.uniform_int(0, 2)];
    for (auto& v : out.data)
      if (v == from) v = to;
  }
  return out;
}

double proxy_rating(const TissueSeg& ground_truth, const TissueSeg& candidate) {
  return 1.0 + 5.0 * dice(ground_truth, candidate);
}

}  // namespace dqe
