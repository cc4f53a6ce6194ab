#pragma once

#include <cstdint>
#include <vector>

#include "dqe/volume.hpp"

namespace dqe {

// Training-time augmentation over SliceStacks. Spatial transforms move MR
// and label channels identically (labels resampled nearest-neighbor);
// intensity and artifact transforms touch MR channels only. The paper-style
// transform list is fully parameterized here; defaults are conservative.
struct AugmentConfig {
  // fire probabilities
  double p_gaussian_noise = 0.5;
  double p_flip_horizontal = 0.5;
  double p_flip_vertical = 0.5;
  double p_affine = 0.5;
  double p_elastic = 0.5;
  double p_contrast = 0.5;
  double p_brightness = 0.5;
  double p_gamma = 0.5;
  double p_low_resolution = 0.5;
  double p_rician_noise = 0.5;
  double p_motion = 0.5;
  double p_ghosting = 0.5;
  double p_spikes = 0.5;
  double p_bias_field = 0.5;

  // magnitude ranges (drawn uniformly unless noted)
  double noise_sigma_min = 0.0, noise_sigma_max = 0.05;    // of the [0,1] range
  double rotation_deg_max = 15.0;                          // drawn in [-max, max]
  double scale_min = 0.9, scale_max = 1.1;
  double translation_frac_max = 0.1;                       // of each dimension
  int elastic_grid_spacing = 8;                            // control-grid pitch, px
  double elastic_sigma_min = 0.5, elastic_sigma_max = 2.0; // node displacement sigma, px
  double contrast_min = 0.75, contrast_max = 1.25;
  double brightness_max = 0.1;                             // shift in [-max, max]
  double gamma_min = 0.7, gamma_max = 1.5;
  double lowres_factor_min = 1.0, lowres_factor_max = 2.0; // downsample factor
  double rician_sigma_min = 0.0, rician_sigma_max = 0.05;
  double motion_shift_max = 3.0;                           // px
  double motion_weight_max = 0.4;                          // ghost-image blend weight
  int ghost_period_min = 2, ghost_period_max = 4;          // every n-th k-space line
  double ghost_intensity_min = 0.0, ghost_intensity_max = 0.5;
  double spike_amp_min = 0.0, spike_amp_max = 0.3;         // relative to |DC|
  int bias_field_order = 2;                                // polynomial order
  double bias_coeff_max = 0.3;

  uint64_t seed = 0;

  void validate() const;  // throws InvalidConfig

  // all probabilities zero; handy identity baseline
  static AugmentConfig none();
};

enum class SpatialKind { flip, affine, elastic };
enum class IntensityKind { gaussian_noise, contrast, brightness, gamma, low_resolution, rician_noise };
enum class ArtifactKind { motion, ghosting, spikes, bias_field };

struct FlipParams {
  bool horizontal = false;
  bool vertical = false;
};

struct AffineParams {
  double rotation_deg = 0;
  double scale = 1;
  double translate_x_frac = 0;
  double translate_y_frac = 0;
};

struct ElasticParams {
  int grid_spacing = 8;
  double sigma = 0;  // px; the dense field is drawn from `draw` at apply time
};

struct SpatialParams {
  FlipParams flip;
  AffineParams affine;
  ElasticParams elastic;
};

struct IntensityParams {
  double noise_sigma = 0;
  double contrast_scale = 1;
  double brightness_shift = 0;
  double gamma = 1;
  double lowres_factor = 1;
  double rician_sigma = 0;
};

struct ArtifactParams {
  double motion_shift_y = 0, motion_shift_x = 0;
  double motion_weight = 0;
  int ghost_axis = 0;  // 0: modulate rows, 1: columns
  int ghost_period = 2;
  double ghost_intensity = 0;
  int spike_ky = 0, spike_kx = 0;
  double spike_amp = 0;
  double spike_phase = 0;
  int bias_order = 2;
  std::vector<double> bias_coeffs;  // (order+1)(order+2)/2 entries, row-major over (i,j), i+j<=order
};

SliceStack transform_spatial(const SliceStack& stack, SpatialKind kind, const SpatialParams& params,
                             Rng& draw);
SliceStack transform_intensity(const SliceStack& stack, IntensityKind kind,
                               const IntensityParams& params, Rng& draw);
SliceStack transform_artifact(const SliceStack& stack, ArtifactKind kind,
                              const ArtifactParams& params);

// Full pipeline with per-transform fire decisions and magnitudes drawn from
// `draw`. Same stack, config, and RNG state give bit-identical output.
SliceStack apply_pipeline(const SliceStack& stack, const AugmentConfig& config, Rng& draw);

}  // namespace dqe
