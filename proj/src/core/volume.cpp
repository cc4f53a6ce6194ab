#include "dqe/volume.hpp"

#include <algorithm>
#include <cmath>

#include "dqe/nifti.hpp"

namespace dqe {

const char* to_string(Axis a) {
  switch (a) {
    case Axis::axial: return "axial";
    case Axis::coronal: return "coronal";
    default: return "sagittal";
  }
}
const char* to_string(LabelEncoding e) { return e == LabelEncoding::single ? "single" : "brats"; }
const char* to_string(NormMethod m) { return m == NormMethod::minmax ? "minmax" : "percentile"; }

Axis axis_from_string(const std::string& s) {
  if (s == "axial") return Axis::axial;
  if (s == "coronal") return Axis::coronal;
  if (s == "sagittal") return Axis::sagittal;
  throw InvalidConfig("unknown axis: " + s);
}
LabelEncoding encoding_from_string(const std::string& s) {
  if (s == "single") return LabelEncoding::single;
  if (s == "brats") return LabelEncoding::brats;
  throw InvalidConfig("unknown label encoding: " + s);
}
NormMethod norm_from_string(const std::string& s) {
  if (s == "minmax") return NormMethod::minmax;
  if (s == "percentile") return NormMethod::percentile;
  throw InvalidConfig("unknown normalization: " + s);
}

namespace {

Volume3D to_volume(const NiftiVolume& n, const std::string& path) {
  Volume3D v(n.nx, n.ny, n.nz, n.sx, n.sy, n.sz);
  for (size_t i = 0; i < n.data.size(); ++i) {
    if (!std::isfinite(n.data[i]))
      throw NonFiniteIntensity("non-finite intensity at voxel " + std::to_string(i) + " in " + path);
    v.data[i] = n.data[i];
  }
  return v;
}

TissueSeg to_seg(const NiftiVolume& n, const std::string& path) {
  TissueSeg s(n.nx, n.ny, n.nz, n.sx, n.sy, n.sz);
  for (size_t i = 0; i < n.data.size(); ++i) {
    const float f = n.data[i];
    if (!std::isfinite(f)) throw InvalidLabelValue("non-finite label in " + path);
    const long v = std::lround(f);
    if (std::fabs(f - static_cast<float>(v)) > 1e-3f || v < 0 || v > 255 ||
        !valid_label(static_cast<uint8_t>(v)))
      throw InvalidLabelValue("segmentation value " + std::to_string(f) +
                              " outside {0,1,2,4} in " + path);
    s.data[i] = static_cast<uint8_t>(v);
  }
  return s;
}

void check_geometry(const NiftiVolume& a, const NiftiVolume& b, const std::string& pa,
                    const std::string& pb) {
  if (a.nx != b.nx || a.ny != b.ny || a.nz != b.nz)
    throw ShapeMismatch("volume shapes differ: " + pa + " vs " + pb);
  const double tol = 1e-4;
  if (std::fabs(a.sx - b.sx) > tol || std::fabs(a.sy - b.sy) > tol || std::fabs(a.sz - b.sz) > tol)
    throw ShapeMismatch("voxel spacings differ: " + pa + " vs " + pb);
}

}  // namespace

Exam load_exam(const std::string& exam_id, const std::array<std::string, 4>& modality_paths,
               const std::string& seg_path) {
  std::array<NiftiVolume, 4> mods;
  for (int i = 0; i < 4; ++i) mods[static_cast<size_t>(i)] = read_nifti(modality_paths[static_cast<size_t>(i)]);
  NiftiVolume segn = read_nifti(seg_path);

  for (int i = 1; i < 4; ++i)
    check_geometry(mods[0], mods[static_cast<size_t>(i)], modality_paths[0], modality_paths[static_cast<size_t>(i)]);
  check_geometry(mods[0], segn, modality_paths[0], seg_path);

  Exam exam;
  exam.exam_id = exam_id;
  exam.t1 = to_volume(mods[0], modality_paths[0]);
  exam.t1c = to_volume(mods[1], modality_paths[1]);
  exam.t2 = to_volume(mods[2], modality_paths[2]);
  exam.flair = to_volume(mods[3], modality_paths[3]);
  exam.seg = to_seg(segn, seg_path);
  exam.axis_map = mods[0].axis_map;
  return exam;
}

std::array<double, 3> center_of_mass(const TissueSeg& mask) {
  double sum[3] = {0, 0, 0};
  size_t count = 0;
  size_t i = 0;
  for (int z = 0; z < mask.nz; ++z)
    for (int y = 0; y < mask.ny; ++y)
      for (int x = 0; x < mask.nx; ++x, ++i)
        if (mask.data[i] != 0) {
          sum[0] += x;
          sum[1] += y;
          sum[2] += z;
          ++count;
        }
  if (count == 0) throw EmptyMask("center_of_mass: mask has no foreground voxels");
  return {sum[0] / count, sum[1] / count, sum[2] / count};
}

TissueSeg whole_tumor_mask(const TissueSeg& seg) {
  TissueSeg m(seg.nx, seg.ny, seg.nz, seg.sx, seg.sy, seg.sz);
  for (size_t i = 0; i < seg.data.size(); ++i) m.data[i] = seg.data[i] != 0 ? 1 : 0;
  return m;
}

void encode_labels(const uint8_t* seg_slice, int h, int w, LabelEncoding mode, float* out) {
  const size_t n = static_cast<size_t>(h) * w;
  if (mode == LabelEncoding::single) {
    for (size_t i = 0; i < n; ++i) {
      const uint8_t v = seg_slice[i];
      if (!valid_label(v)) throw InvalidLabelValue("label " + std::to_string(v) + " outside {0,1,2,4}");
      // contiguous ordinal codes: {0,1,2,4} -> {0,1,2,3}
      out[i] = v == 4 ? 3.0f : static_cast<float>(v);
    }
  } else {
    float* et = out;
    float* tc = out + n;
    float* wt = out + 2 * n;
    for (size_t i = 0; i < n; ++i) {
      const uint8_t v = seg_slice[i];
      if (!valid_label(v)) throw InvalidLabelValue("label " + std::to_string(v) + " outside {0,1,2,4}");
      et[i] = v == 4 ? 1.0f : 0.0f;
      tc[i] = (v == 4 || v == 1) ? 1.0f : 0.0f;
      wt[i] = v != 0 ? 1.0f : 0.0f;
    }
  }
}

double percentile_interpolated(std::vector<float> values, double p) {
  if (values.empty()) throw EmptySeries("percentile of empty set");
  std::sort(values.begin(), values.end());
  const double rank = p / 100.0 * static_cast<double>(values.size() - 1);
  const size_t lo = static_cast<size_t>(std::floor(rank));
  const size_t hi = std::min(lo + 1, values.size() - 1);
  const double frac = rank - static_cast<double>(lo);
  return static_cast<double>(values[lo]) + frac * (static_cast<double>(values[hi]) - values[lo]);
}

std::array<float, 2> normalize_channel(float* channel, size_t n, NormMethod method) {
  float lo, hi;
  if (method == NormMethod::minmax) {
    lo = hi = channel[0];
    for (size_t i = 1; i < n; ++i) {
      lo = std::min(lo, channel[i]);
      hi = std::max(hi, channel[i]);
    }
  } else {
    std::vector<float> copy(channel, channel + n);
    lo = static_cast<float>(percentile_interpolated(copy, 0.5));
    hi = static_cast<float>(percentile_interpolated(std::move(copy), 99.5));
  }
  const float range = hi - lo;
  if (!(range > 0.0f)) {
    std::fill(channel, channel + n, 0.0f);
    return {lo, hi};
  }
  for (size_t i = 0; i < n; ++i) {
    const float clipped = std::min(std::max(channel[i], lo), hi);
    channel[i] = (clipped - lo) / range;
  }
  return {lo, hi};
}

namespace {

// Copies the 2D plane orthogonal to voxel axis `vax` at index k. Plane axes
// are the remaining voxel axes in increasing order: lower = width (fastest).
template <class T, class U>
void copy_plane(const Grid3<T>& vol, int vax, int k, U* out, int& w, int& h) {
  const int a = vax == 0 ? 1 : 0;
  const int b = vax == 2 ? 1 : 2;
  w = vol.dim(a);
  h = vol.dim(b);
  int idx[3];
  idx[vax] = k;
  size_t o = 0;
  for (int j = 0; j < h; ++j) {
    idx[b] = j;
    for (int i = 0; i < w; ++i, ++o) {
      idx[a] = i;
      out[o] = static_cast<U>(vol.at(idx[0], idx[1], idx[2]));
    }
  }
}

}  // namespace

SliceStack extract_com_slices(const Exam& exam, Axis axis, LabelEncoding encoding,
                              NormMethod normalization) {
  const int vax = exam.voxel_axis(axis);
  const int n_axis = exam.seg.dim(vax);

  int slice_index;
  bool any_fg = false;
  for (uint8_t v : exam.seg.data)
    if (v != 0) {
      any_fg = true;
      break;
    }
  if (any_fg) {
    const auto com = center_of_mass(exam.seg);
    slice_index = round_half_down(com[static_cast<size_t>(vax)]);
    slice_index = std::clamp(slice_index, 0, n_axis - 1);
  } else {
    // empty (failed) segmentations are a target use case: fall back to the
    // central slice instead of erroring
    slice_index = n_axis / 2;
  }

  SliceStack stack;
  stack.axis = axis;
  stack.slice_index = slice_index;
  stack.encoding = encoding;
  stack.normalization = normalization;
  stack.n_labels = label_channel_count(encoding);

  int w = 0, h = 0;
  {
    // probe plane dims from the segmentation
    const int a = vax == 0 ? 1 : 0;
    const int b = vax == 2 ? 1 : 2;
    w = exam.seg.dim(a);
    h = exam.seg.dim(b);
  }
  stack.width = w;
  stack.height = h;
  stack.channels.assign(static_cast<size_t>(stack.n_channels()) * w * h, 0.0f);

  for (int m = 0; m < 4; ++m) {
    int pw, ph;
    copy_plane(exam.modality(m), vax, slice_index, stack.channel(m), pw, ph);
    stack.norm_stats[static_cast<size_t>(m)] =
        normalize_channel(stack.channel(m), stack.plane(), normalization);
  }

  std::vector<uint8_t> seg_plane(static_cast<size_t>(w) * h);
  int pw, ph;
  copy_plane(exam.seg, vax, slice_index, seg_plane.data(), pw, ph);
  encode_labels(seg_plane.data(), h, w, encoding, stack.channel(4));
  return stack;
}

}  // namespace dqe
