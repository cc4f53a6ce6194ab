#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "dqe/common.hpp"

namespace dqe {

enum class Axis { axial = 0, coronal = 1, sagittal = 2 };
enum class LabelEncoding { single, brats };
enum class NormMethod { minmax, percentile };

const char* to_string(Axis a);
const char* to_string(LabelEncoding e);
const char* to_string(NormMethod m);
Axis axis_from_string(const std::string& s);
LabelEncoding encoding_from_string(const std::string& s);
NormMethod norm_from_string(const std::string& s);

constexpr std::array<Axis, 3> kAllAxes{Axis::axial, Axis::coronal, Axis::sagittal};

// 3D grid, x fastest (NIfTI order). Spacing in millimeters.
template <class T>
struct Grid3 {
  std::vector<T> data;
  int nx = 0, ny = 0, nz = 0;
  double sx = 1, sy = 1, sz = 1;

  Grid3() = default;
  Grid3(int nx_, int ny_, int nz_, double sx_ = 1, double sy_ = 1, double sz_ = 1)
      : data(static_cast<size_t>(nx_) * ny_ * nz_, T{}), nx(nx_), ny(ny_), nz(nz_), sx(sx_), sy(sy_),
        sz(sz_) {}

  size_t size() const { return data.size(); }
  T& at(int x, int y, int z) { return data[static_cast<size_t>(z) * nx * ny + static_cast<size_t>(y) * nx + x]; }
  const T& at(int x, int y, int z) const {
    return data[static_cast<size_t>(z) * nx * ny + static_cast<size_t>(y) * nx + x];
  }
  int dim(int axis) const { return axis == 0 ? nx : axis == 1 ? ny : nz; }
  double spacing(int axis) const { return axis == 0 ? sx : axis == 1 ? sy : sz; }
  bool same_shape(int ox, int oy, int oz) const { return nx == ox && ny == oy && nz == oz; }
};

using Volume3D = Grid3<float>;
using TissueSeg = Grid3<uint8_t>;  // values in {0 background, 1 necrosis, 2 edema, 4 enhancing}

constexpr uint8_t kLabelBackground = 0;
constexpr uint8_t kLabelNecrosis = 1;
constexpr uint8_t kLabelEdema = 2;
constexpr uint8_t kLabelEnhancing = 4;

inline bool valid_label(uint8_t v) { return v == 0 || v == 1 || v == 2 || v == 4; }

// One subject: four co-registered MR modalities plus the tissue segmentation.
struct Exam {
  std::string exam_id;
  Volume3D t1, t1c, t2, flair;
  TissueSeg seg;
  std::array<int, 3> axis_map{0, 1, 2};  // anatomical axis -> voxel axis (sag, cor, ax)

  const Volume3D& modality(int i) const {
    switch (i) {
      case 0: return t1;
      case 1: return t1c;
      case 2: return t2;
      default: return flair;
    }
  }
  int voxel_axis(Axis a) const {
    switch (a) {
      case Axis::sagittal: return axis_map[0];
      case Axis::coronal: return axis_map[1];
      default: return axis_map[2];
    }
  }
};

// 2D network input: 4 normalized MR channels followed by 1 or 3 label
// channels, taken at a center-of-mass slice. Channel-major, row-major pixels.
struct SliceStack {
  int width = 0, height = 0;
  int n_labels = 0;  // 1 (single encoding) or 3 (brats)
  std::vector<float> channels;
  Axis axis = Axis::axial;
  int slice_index = 0;
  LabelEncoding encoding = LabelEncoding::single;
  NormMethod normalization = NormMethod::minmax;
  // normalization interval actually applied per MR channel (provenance)
  std::array<std::array<float, 2>, 4> norm_stats{};

  int n_channels() const { return 4 + n_labels; }
  size_t plane() const { return static_cast<size_t>(width) * height; }
  float* channel(int c) { return channels.data() + static_cast<size_t>(c) * plane(); }
  const float* channel(int c) const { return channels.data() + static_cast<size_t>(c) * plane(); }
};

// Loads five co-registered NIfTI files (t1, t1c, t2, flair order) and
// validates shapes, spacing, finiteness, and the segmentation value set.
Exam load_exam(const std::string& exam_id, const std::array<std::string, 4>& modality_paths,
               const std::string& seg_path);

// Unweighted mean of foreground (nonzero) voxel indices. Throws EmptyMask.
std::array<double, 3> center_of_mass(const TissueSeg& mask);

TissueSeg whole_tumor_mask(const TissueSeg& seg);

// Round-half-down to an integer slice index: ties at .5 go to the lower slice.
inline int round_half_down(double x) { return static_cast<int>(std::ceil(x - 0.5)); }

SliceStack extract_com_slices(const Exam& exam, Axis axis, LabelEncoding encoding,
                              NormMethod normalization);

// Remaps a 2D label slice into 1 (single: codes {0,1,2,4}->{0,1,2,3}) or
// 3 (brats: binary ET/TC/WT) channels. `out` must hold n_labels*h*w floats.
void encode_labels(const uint8_t* seg_slice, int h, int w, LabelEncoding mode, float* out);
inline int label_channel_count(LabelEncoding mode) { return mode == LabelEncoding::single ? 1 : 3; }

// In-place normalization of one channel to [0,1]. Returns the (lo, hi)
// interval used; degenerate intervals map the channel to all zeros.
std::array<float, 2> normalize_channel(float* channel, size_t n, NormMethod method);

// Percentile with linear interpolation between order statistics (p in [0,100]).
double percentile_interpolated(std::vector<float> values, double p);

}  // namespace dqe
