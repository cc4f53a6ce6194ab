#pragma once

#include <array>
#include <string>
#include <vector>

#include "dqe/common.hpp"

namespace dqe {

// Minimal NIfTI-1 reader/writer for single-file .nii / .nii.gz volumes.
// Voxel data is returned as float after scl_slope/scl_inter scaling.
// Orientation metadata (sform, then qform) is used only to label which voxel
// axis runs sagittal/coronal/axial; in-plane flips are not applied. Without
// metadata the convention is sagittal=0, coronal=1, axial=2.
struct NiftiVolume {
  std::vector<float> data;  // x fastest: data[x + nx*(y + ny*z)]
  int nx = 0, ny = 0, nz = 0;
  double sx = 1, sy = 1, sz = 1;          // voxel spacing, mm
  std::array<int, 3> axis_map{0, 1, 2};   // anatomical axis -> voxel axis
};

NiftiVolume read_nifti(const std::string& path);

// Writes float32 (or uint8) little-endian, gzip-compressed when the path
// ends in .gz. The direction matrix defaults to identity scaled by spacing.
void write_nifti(const std::string& path, const float* data, int nx, int ny, int nz, double sx,
                 double sy, double sz);
void write_nifti_u8(const std::string& path, const uint8_t* data, int nx, int ny, int nz, double sx,
                    double sy, double sz);

}  // namespace dqe
