#pragma once

#include <array>
#include <cstdint>

#include "dqe/volume.hpp"

namespace dqe {

// Synthetic phantom exams: a deformed-ellipsoid tumor with nested
// necrosis/enhancing/edema shells inside a brain-like background, rendered
// into four modality volumes with distinct tissue contrasts plus noise.
struct PhantomParams {
  int grid = 64;                       // cubic grid edge, voxels
  double spacing_mm = 1.0;
  double radius_min = 9.0, radius_max = 15.0;  // whole-tumor radius, voxels
  double core_frac = 0.35;             // necrosis core extent (fraction of radius)
  double rim_frac = 0.65;              // enhancing rim outer extent
  double lumpiness = 0.25;             // amplitude of the boundary deformation
  double noise_sigma = 0.04;
  // mean intensity per tissue row {background, brain, necrosis, edema, enhancing}
  // and modality column {t1, t1c, t2, flair}
  std::array<std::array<double, 4>, 5> tissue_means{{
      {0.00, 0.00, 0.00, 0.00},   // background (outside head)
      {0.55, 0.55, 0.45, 0.45},   // normal brain
      {0.25, 0.30, 0.65, 0.55},   // necrosis
      {0.40, 0.45, 0.70, 0.80},   // edema
      {0.50, 0.85, 0.55, 0.60},   // enhancing tumor
  }};
  uint64_t seed = 0;

  void validate() const;  // throws InvalidParams
};

// Deterministic given params.seed XOR'd with `seed_offset` (so one params
// block can stamp out a whole cohort).
Exam generate_phantom(const PhantomParams& params, uint64_t seed_offset = 0);

// Severity-scaled corruption: boundary erosion/dilation noise, a rigid
// shift, class swaps, hole punching, and spurious components. Severity 0
// returns the input bit-identically; expected whole-tumor DSC against the
// input decreases with severity.
TissueSeg degrade_segmentation(const TissueSeg& seg, double severity, uint64_t seed);

// Monotone DSC -> star surrogate: 1 + 5 * DSC(whole tumor).
double proxy_rating(const TissueSeg& ground_truth, const TissueSeg& candidate);

}  // namespace dqe
