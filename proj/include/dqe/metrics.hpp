#pragma once

#include <string>
#include <vector>

#include "dqe/volume.hpp"

namespace dqe {

// Paired predictions/references for regression metrics.
struct PairedSeries {
  std::vector<double> predictions;
  std::vector<double> references;

  void validate() const;
  size_t size() const { return predictions.size(); }
};

double mae(const PairedSeries& s);
double rmse(const PairedSeries& s);
double pearson_r(const PairedSeries& s);

struct BlandAltman {
  double mean_diff;
  double sd_diff;   // sample SD (n-1); 0 for a single pair
  double loa_low;   // mean - 1.96*sd
  double loa_high;  // mean + 1.96*sd
};

BlandAltman bland_altman(const PairedSeries& s);

// Sorensen-Dice on binary grids (nonzero = foreground). Both empty -> 1.0.
double dice(const TissueSeg& a, const TissueSeg& b);

// Symmetrized surface Dice at a millimeter tolerance. Boundary voxels are
// foreground voxels with at least one background face neighbor (8-neighbor
// in-plane when the grid is a single slice); out-of-grid counts as
// background. Distances use the grids' voxel spacing.
double surface_dice(const TissueSeg& a, const TissueSeg& b, double tolerance_mm);

// Writes points plus a least-squares line fit of reference on prediction:
//   kind,a,b
//   point,<prediction>,<reference>   (n rows)
//   fit,<slope>,<intercept>          (or fit,degenerate,degenerate)
void scatter_export(const PairedSeries& s, const std::string& path);

// Least-squares fit helper; returns false when var(prediction) == 0.
bool linear_fit(const PairedSeries& s, double& slope, double& intercept);

}  // namespace dqe
