#include "dqe/augment.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

#include "dqe/kernels/fft.hpp"
#include "dqe/kernels/image.hpp"

namespace dqe {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw InvalidConfig(what);
}

void check_prob(double p, const char* name) {
  if (!(p >= 0.0 && p <= 1.0)) throw InvalidConfig(std::string(name) + " probability outside [0,1]");
}

}  // namespace

void AugmentConfig::validate() const {
  check_prob(p_gaussian_noise, "gaussian_noise");
  check_prob(p_flip_horizontal, "flip_horizontal");
  check_prob(p_flip_vertical, "flip_vertical");
  check_prob(p_affine, "affine");
  check_prob(p_elastic, "elastic");
  check_prob(p_contrast, "contrast");
  check_prob(p_brightness, "brightness");
  check_prob(p_gamma, "gamma");
  check_prob(p_low_resolution, "low_resolution");
  check_prob(p_rician_noise, "rician_noise");
  check_prob(p_motion, "motion");
  check_prob(p_ghosting, "ghosting");
  check_prob(p_spikes, "spikes");
  check_prob(p_bias_field, "bias_field");

  require(noise_sigma_min >= 0 && noise_sigma_min <= noise_sigma_max, "noise sigma range invalid");
  require(rotation_deg_max >= 0, "rotation magnitude negative");
  require(scale_min > 0 && scale_min <= scale_max, "scale range invalid");
  require(translation_frac_max >= 0, "translation magnitude negative");
  require(elastic_grid_spacing >= 2, "elastic grid spacing must be >= 2");
  require(elastic_sigma_min >= 0 && elastic_sigma_min <= elastic_sigma_max,
          "elastic sigma range invalid");
  require(contrast_min > 0 && contrast_min <= contrast_max, "contrast range invalid");
  require(brightness_max >= 0, "brightness magnitude negative");
  require(gamma_min > 0 && gamma_min <= gamma_max, "gamma range invalid");
  require(lowres_factor_min >= 1 && lowres_factor_min <= lowres_factor_max,
          "low-resolution factor range invalid");
  require(rician_sigma_min >= 0 && rician_sigma_min <= rician_sigma_max,
          "rician sigma range invalid");
  require(motion_shift_max >= 0 && motion_weight_max >= 0 && motion_weight_max <= 1,
          "motion parameters invalid");
  require(ghost_period_min >= 2 && ghost_period_min <= ghost_period_max, "ghost period range invalid");
  require(ghost_intensity_min >= 0 && ghost_intensity_min <= ghost_intensity_max &&
              ghost_intensity_max <= 1,
          "ghost intensity range invalid");
  require(spike_amp_min >= 0 && spike_amp_min <= spike_amp_max, "spike amplitude range invalid");
  require(bias_field_order >= 0 && bias_coeff_max >= 0, "bias field parameters invalid");
}

AugmentConfig AugmentConfig::none() {
  AugmentConfig c;
  c.p_gaussian_noise = c.p_flip_horizontal = c.p_flip_vertical = c.p_affine = c.p_elastic =
      c.p_contrast = c.p_brightness = c.p_gamma = c.p_low_resolution = c.p_rician_noise = c.p_motion =
          c.p_ghosting = c.p_spikes = c.p_bias_field = 0.0;
  return c;
}

namespace {

// flips are pure pixel permutations, never resampled
void flip_channel(float* ch, int h, int w, bool horizontal, bool vertical) {
  if (horizontal)
    for (int y = 0; y < h; ++y) std::reverse(ch + static_cast<size_t>(y) * w, ch + static_cast<size_t>(y + 1) * w);
  if (vertical)
    for (int y = 0; y < h / 2; ++y)
      std::swap_ranges(ch + static_cast<size_t>(y) * w, ch + static_cast<size_t>(y + 1) * w,
                       ch + static_cast<size_t>(h - 1 - y) * w);
}

SliceStack apply_flip(const SliceStack& in, const FlipParams& p) {
  SliceStack out = in;
  for (int c = 0; c < out.n_channels(); ++c)
    flip_channel(out.channel(c), out.height, out.width, p.horizontal, p.vertical);
  return out;
}

// Inverse (output -> source) map for rotation+scale about the image center
// followed by translation.
kernels::Affine2 inverse_affine(const AffineParams& p, int h, int w) {
  if (!(p.scale > 0)) throw InvalidConfig("affine scale must be positive");
  const double cx = (w - 1) / 2.0;
  const double cy = (h - 1) / 2.0;
  const double tx = p.translate_x_frac * w;
  const double ty = p.translate_y_frac * h;
  const double th = p.rotation_deg * kPi / 180.0;
  const double c = std::cos(th), s = std::sin(th);
  // src = C + R(-th)/scale * (dst - t - C)
  kernels::Affine2 m;
  m.a00 = c / p.scale;
  m.a01 = s / p.scale;
  m.a10 = -s / p.scale;
  m.a11 = c / p.scale;
  m.a02 = cx - m.a00 * (cx + tx) - m.a01 * (cy + ty);
  m.a12 = cy - m.a10 * (cx + tx) - m.a11 * (cy + ty);
  return m;
}

SliceStack apply_affine(const SliceStack& in, const AffineParams& p) {
  const auto inv = inverse_affine(p, in.height, in.width);
  SliceStack out = in;
  for (int c = 0; c < in.n_channels(); ++c)
    kernels::warp_affine(in.channel(c), in.height, in.width, inv, out.channel(c), c >= 4);
  return out;
}

SliceStack apply_elastic(const SliceStack& in, const ElasticParams& p, Rng& draw) {
  if (p.grid_spacing < 2) throw InvalidConfig("elastic grid spacing must be >= 2");
  if (p.sigma < 0) throw InvalidConfig("elastic sigma must be >= 0");
  const int h = in.height, w = in.width;
  const int gh = (h - 1) / p.grid_spacing + 2;
  const int gw = (w - 1) / p.grid_spacing + 2;
  std::vector<float> ndy(static_cast<size_t>(gh) * gw), ndx(ndy.size());
  for (auto& v : ndy) v = static_cast<float>(draw.normal(0.0, p.sigma));
  for (auto& v : ndx) v = static_cast<float>(draw.normal(0.0, p.sigma));

  // dense field by bilinear interpolation of the control grid
  std::vector<float> dy(static_cast<size_t>(h) * w), dx(dy.size());
  for (int y = 0; y < h; ++y) {
    const double gy = static_cast<double>(y) / p.grid_spacing;
    for (int x = 0; x < w; ++x) {
      const double gx = static_cast<double>(x) / p.grid_spacing;
      const size_t i = static_cast<size_t>(y) * w + x;
      dy[i] = kernels::detail::sample_bilinear(ndy.data(), gh, gw, gy, gx);
      dx[i] = kernels::detail::sample_bilinear(ndx.data(), gh, gw, gy, gx);
    }
  }
  SliceStack out = in;
  for (int c = 0; c < in.n_channels(); ++c)
    kernels::warp_field(in.channel(c), h, w, dy.data(), dx.data(), out.channel(c), c >= 4);
  return out;
}

void lowres_channel(float* ch, int h, int w, double factor, std::vector<float>& scratch) {
  const int dh = std::max(1, static_cast<int>(std::lround(h / factor)));
  const int dw = std::max(1, static_cast<int>(std::lround(w / factor)));
  if (dh == h && dw == w) return;
  scratch.resize(static_cast<size_t>(dh) * dw);
  std::vector<float> full(ch, ch + static_cast<size_t>(h) * w);
  kernels::resize(full.data(), h, w, scratch.data(), dh, dw, false);
  kernels::resize(scratch.data(), dh, dw, ch, h, w, false);
}

SliceStack apply_intensity(const SliceStack& in, IntensityKind kind, const IntensityParams& p,
                           Rng& draw) {
  SliceStack out = in;
  const size_t n = out.plane();
  std::vector<float> scratch;
  for (int c = 0; c < 4; ++c) {
    float* ch = out.channel(c);
    switch (kind) {
      case IntensityKind::gaussian_noise: {
        if (p.noise_sigma < 0) throw InvalidConfig("noise sigma must be >= 0");
        for (size_t i = 0; i < n; ++i) ch[i] += static_cast<float>(draw.normal(0.0, p.noise_sigma));
        break;
      }
      case IntensityKind::contrast: {
        if (!(p.contrast_scale > 0)) throw InvalidConfig("contrast scale must be positive");
        if (p.contrast_scale == 1.0) break;
        double mean = 0;
        for (size_t i = 0; i < n; ++i) mean += ch[i];
        mean /= static_cast<double>(n);
        for (size_t i = 0; i < n; ++i)
          ch[i] = static_cast<float>(mean + (ch[i] - mean) * p.contrast_scale);
        break;
      }
      case IntensityKind::brightness: {
        const float shift = static_cast<float>(p.brightness_shift);
        for (size_t i = 0; i < n; ++i) ch[i] += shift;
        break;
      }
      case IntensityKind::gamma: {
        if (!(p.gamma > 0)) throw InvalidConfig("gamma must be positive");
        if (p.gamma == 1.0) break;
        // inputs are normalized; clamp guards against small negative drift
        for (size_t i = 0; i < n; ++i)
          ch[i] = std::pow(std::max(ch[i], 0.0f), static_cast<float>(p.gamma));
        break;
      }
      case IntensityKind::low_resolution: {
        if (p.lowres_factor < 1) throw InvalidConfig("low-resolution factor must be >= 1");
        if (p.lowres_factor == 1.0) break;
        lowres_channel(ch, out.height, out.width, p.lowres_factor, scratch);
        break;
      }
      case IntensityKind::rician_noise: {
        if (p.rician_sigma < 0) throw InvalidConfig("rician sigma must be >= 0");
        for (size_t i = 0; i < n; ++i) {
          const double n1 = draw.normal(0.0, p.rician_sigma);
          const double n2 = draw.normal(0.0, p.rician_sigma);
          ch[i] = static_cast<float>(std::sqrt((ch[i] + n1) * (ch[i] + n1) + n2 * n2));
        }
        break;
      }
    }
  }
  return out;
}

void channel_to_kspace(const float* ch, int h, int w, std::vector<kernels::cplx>& k) {
  k.resize(static_cast<size_t>(h) * w);
  for (size_t i = 0; i < k.size(); ++i) k[i] = kernels::cplx(ch[i], 0.0);
  kernels::fft_2d(k.data(), h, w, false);
}

void kspace_to_channel(std::vector<kernels::cplx>& k, int h, int w, float* ch) {
  kernels::fft_2d(k.data(), h, w, true);
  for (size_t i = 0; i < k.size(); ++i) ch[i] = static_cast<float>(k[i].real());
}

SliceStack apply_artifact(const SliceStack& in, ArtifactKind kind, const ArtifactParams& p) {
  SliceStack out = in;
  const int h = in.height, w = in.width;
  const size_t n = in.plane();

  switch (kind) {
    case ArtifactKind::motion: {
      if (p.motion_weight < 0 || p.motion_weight > 1)
        throw InvalidConfig("motion weight outside [0,1]");
      // blend with a shifted copy; intensity-domain artifact, labels keep
      // their position (zero net displacement)
      kernels::Affine2 inv;
      inv.a02 = -p.motion_shift_x;
      inv.a12 = -p.motion_shift_y;
      std::vector<float> shifted(n);
      const float wgt = static_cast<float>(p.motion_weight);
      for (int c = 0; c < 4; ++c) {
        float* ch = out.channel(c);
        kernels::warp_affine(in.channel(c), h, w, inv, shifted.data(), false);
        for (size_t i = 0; i < n; ++i) ch[i] = (1.0f - wgt) * ch[i] + wgt * shifted[i];
      }
      break;
    }
    case ArtifactKind::ghosting: {
      if (p.ghost_period < 2) throw InvalidConfig("ghost period must be >= 2");
      if (p.ghost_intensity < 0 || p.ghost_intensity > 1)
        throw InvalidConfig("ghost intensity outside [0,1]");
      if (p.ghost_intensity == 0) break;
      std::vector<kernels::cplx> k;
      const double keep = 1.0 - p.ghost_intensity;
      for (int c = 0; c < 4; ++c) {
        channel_to_kspace(out.channel(c), h, w, k);
        if (p.ghost_axis == 0) {
          for (int y = p.ghost_period; y < h; y += p.ghost_period)
            for (int x = 0; x < w; ++x) k[static_cast<size_t>(y) * w + x] *= keep;
        } else {
          for (int x = p.ghost_period; x < w; x += p.ghost_period)
            for (int y = 0; y < h; ++y) k[static_cast<size_t>(y) * w + x] *= keep;
        }
        kspace_to_channel(k, h, w, out.channel(c));
      }
      break;
    }
    case ArtifactKind::spikes: {
      if (p.spike_amp < 0) throw InvalidConfig("spike amplitude must be >= 0");
      if (p.spike_amp == 0) break;
      const int ky = ((p.spike_ky % h) + h) % h;
      const int kx = ((p.spike_kx % w) + w) % w;
      if (ky == 0 && kx == 0) throw InvalidConfig("spike bin must not be the DC bin");
      std::vector<kernels::cplx> k;
      for (int c = 0; c < 4; ++c) {
        channel_to_kspace(out.channel(c), h, w, k);
        const double mag = p.spike_amp * std::abs(k[0]);
        const kernels::cplx spike = std::polar(mag, p.spike_phase);
        k[static_cast<size_t>(ky) * w + kx] += spike;
        // Hermitian mirror keeps the image real
        const int my = (h - ky) % h;
        const int mx = (w - kx) % w;
        if (my != ky || mx != kx) k[static_cast<size_t>(my) * w + mx] += std::conj(spike);
        kspace_to_channel(k, h, w, out.channel(c));
      }
      break;
    }
    case ArtifactKind::bias_field: {
      if (p.bias_order < 0) throw InvalidConfig("bias order must be >= 0");
      const size_t n_coeff = static_cast<size_t>((p.bias_order + 1) * (p.bias_order + 2) / 2);
      if (p.bias_coeffs.size() != n_coeff)
        throw InvalidConfig("bias field expects " + std::to_string(n_coeff) + " coefficients");
      bool all_zero = true;
      for (double c : p.bias_coeffs) all_zero = all_zero && c == 0.0;
      if (all_zero) break;
      // multiplicative field exp(P(u,v)) with normalized coordinates
      std::vector<float> field(n);
      for (int y = 0; y < h; ++y) {
        const double v = h > 1 ? 2.0 * y / (h - 1) - 1.0 : 0.0;
        for (int x = 0; x < w; ++x) {
          const double u = w > 1 ? 2.0 * x / (w - 1) - 1.0 : 0.0;
          double poly = 0;
          size_t idx = 0;
          for (int i = 0; i <= p.bias_order; ++i)
            for (int j = 0; j + i <= p.bias_order; ++j)
              poly += p.bias_coeffs[idx++] * std::pow(u, i) * std::pow(v, j);
          field[static_cast<size_t>(y) * w + x] = static_cast<float>(std::exp(poly));
        }
      }
      for (int c = 0; c < 4; ++c) {
        float* ch = out.channel(c);
        for (size_t i = 0; i < n; ++i) ch[i] *= field[i];
      }
      break;
    }
  }
  return out;
}

}  // namespace

SliceStack transform_spatial(const SliceStack& stack, SpatialKind kind, const SpatialParams& params,
                             Rng& draw) {
  switch (kind) {
    case SpatialKind::flip: return apply_flip(stack, params.flip);
    case SpatialKind::affine: return apply_affine(stack, params.affine);
    default: return apply_elastic(stack, params.elastic, draw);
  }
}

SliceStack transform_intensity(const SliceStack& stack, IntensityKind kind,
                               const IntensityParams& params, Rng& draw) {
  return apply_intensity(stack, kind, params, draw);
}

SliceStack transform_artifact(const SliceStack& stack, ArtifactKind kind,
                              const ArtifactParams& params) {
  return apply_artifact(stack, kind, params);
}

SliceStack apply_pipeline(const SliceStack& stack, const AugmentConfig& cfg, Rng& draw) {
  cfg.validate();
  SliceStack cur = stack;

  // spatial
  FlipParams flip;
  flip.horizontal = draw.bernoulli(cfg.p_flip_horizontal);
  flip.vertical = draw.bernoulli(cfg.p_flip_vertical);
  if (flip.horizontal || flip.vertical) cur = apply_flip(cur, flip);

  if (draw.bernoulli(cfg.p_affine)) {
    AffineParams a;
    a.rotation_deg = draw.uniform(-cfg.rotation_deg_max, cfg.rotation_deg_max);
    a.scale = draw.uniform(cfg.scale_min, cfg.scale_max);
    a.translate_x_frac = draw.uniform(-cfg.translation_frac_max, cfg.translation_frac_max);
    a.translate_y_frac = draw.uniform(-cfg.translation_frac_max, cfg.translation_frac_max);
    cur = apply_affine(cur, a);
  }
  if (draw.bernoulli(cfg.p_elastic)) {
    ElasticParams e;
    e.grid_spacing = cfg.elastic_grid_spacing;
    e.sigma = draw.uniform(cfg.elastic_sigma_min, cfg.elastic_sigma_max);
    cur = apply_elastic(cur, e, draw);
  }

  // intensity (gamma first, while values are still in the normalized range)
  IntensityParams ip;
  if (draw.bernoulli(cfg.p_gamma)) {
    ip.gamma = draw.uniform(cfg.gamma_min, cfg.gamma_max);
    cur = apply_intensity(cur, IntensityKind::gamma, ip, draw);
  }
  if (draw.bernoulli(cfg.p_contrast)) {
    ip.contrast_scale = draw.uniform(cfg.contrast_min, cfg.contrast_max);
    cur = apply_intensity(cur, IntensityKind::contrast, ip, draw);
  }
  if (draw.bernoulli(cfg.p_brightness)) {
    ip.brightness_shift = draw.uniform(-cfg.brightness_max, cfg.brightness_max);
    cur = apply_intensity(cur, IntensityKind::brightness, ip, draw);
  }
  if (draw.bernoulli(cfg.p_gaussian_noise)) {
    ip.noise_sigma = draw.uniform(cfg.noise_sigma_min, cfg.noise_sigma_max);
    cur = apply_intensity(cur, IntensityKind::gaussian_noise, ip, draw);
  }
  if (draw.bernoulli(cfg.p_rician_noise)) {
    ip.rician_sigma = draw.uniform(cfg.rician_sigma_min, cfg.rician_sigma_max);
    cur = apply_intensity(cur, IntensityKind::rician_noise, ip, draw);
  }
  if (draw.bernoulli(cfg.p_low_resolution)) {
    ip.lowres_factor = draw.uniform(cfg.lowres_factor_min, cfg.lowres_factor_max);
    cur = apply_intensity(cur, IntensityKind::low_resolution, ip, draw);
  }

  // artifacts
  if (draw.bernoulli(cfg.p_bias_field)) {
    ArtifactParams ap;
    ap.bias_order = cfg.bias_field_order;
    const size_t n_coeff =
        static_cast<size_t>((cfg.bias_field_order + 1) * (cfg.bias_field_order + 2) / 2);
    ap.bias_coeffs.resize(n_coeff);
    for (auto& c : ap.bias_coeffs) c = draw.uniform(-cfg.bias_coeff_max, cfg.bias_coeff_max);
    cur = apply_artifact(cur, ArtifactKind::bias_field, ap);
  }
  if (draw.bernoulli(cfg.p_motion)) {
    ArtifactParams ap;
    ap.motion_shift_y = draw.uniform(-cfg.motion_shift_max, cfg.motion_shift_max);
    ap.motion_shift_x = draw.uniform(-cfg.motion_shift_max, cfg.motion_shift_max);
    ap.motion_weight = draw.uniform(0.0, cfg.motion_weight_max);
    cur = apply_artifact(cur, ArtifactKind::motion, ap);
  }
  if (draw.bernoulli(cfg.p_ghosting)) {
    ArtifactParams ap;
    ap.ghost_axis = static_cast<int>(draw.uniform_int(0, 1));
    ap.ghost_period = static_cast<int>(draw.uniform_int(cfg.ghost_period_min, cfg.ghost_period_max));
    ap.ghost_intensity = draw.uniform(cfg.ghost_intensity_min, cfg.ghost_intensity_max);
    cur = apply_artifact(cur, ArtifactKind::ghosting, ap);
  }
  if (draw.bernoulli(cfg.p_spikes)) {
    ArtifactParams ap;
    ap.spike_ky = static_cast<int>(draw.uniform_int(0, stack.height - 1));
    ap.spike_kx = static_cast<int>(draw.uniform_int(0, stack.width - 1));
    if (ap.spike_ky == 0 && ap.spike_kx == 0) ap.spike_kx = 1;
    ap.spike_amp = draw.uniform(cfg.spike_amp_min, cfg.spike_amp_max);
    ap.spike_phase = draw.uniform(0.0, 2.0 * kPi);
    cur = apply_artifact(cur, ArtifactKind::spikes, ap);
  }
  return cur;
}

}  // namespace dqe
