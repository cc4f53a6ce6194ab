#include "dqe/config_json.hpp"

#include <algorithm>

namespace dqe {

using nlohmann::json;

void check_known_keys(const json& j, const std::vector<std::string>& allowed,
                      const std::string& context) {
  if (!j.is_object()) throw InvalidConfig(context + ": expected a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it)
    if (std::find(allowed.begin(), allowed.end(), it.key()) == allowed.end())
      throw InvalidConfig(context + ": unknown key '" + it.key() + "'");
}

namespace {

template <class T>
void get_if(const json& j, const char* key, T& dst) {
  if (j.contains(key)) dst = j.at(key).get<T>();
}

const std::vector<std::string> kAugmentKeys{
    "p_gaussian_noise", "p_flip_horizontal", "p_flip_vertical", "p_affine", "p_elastic",
    "p_contrast", "p_brightness", "p_gamma", "p_low_resolution", "p_rician_noise", "p_motion",
    "p_ghosting", "p_spikes", "p_bias_field", "noise_sigma_min", "noise_sigma_max",
    "rotation_deg_max", "scale_min", "scale_max", "translation_frac_max", "elastic_grid_spacing",
    "elastic_sigma_min", "elastic_sigma_max", "contrast_min", "contrast_max", "brightness_max",
    "gamma_min", "gamma_max", "lowres_factor_min", "lowres_factor_max", "rician_sigma_min",
    "rician_sigma_max", "motion_shift_max", "motion_weight_max", "ghost_period_min",
    "ghost_period_max", "ghost_intensity_min", "ghost_intensity_max", "spike_amp_min",
    "spike_amp_max", "bias_field_order", "bias_coeff_max", "seed"};

const std::vector<std::string> kTrainKeys{"arch",          "optimizer",  "normalization",
                                          "encoding",      "learning_rate", "batch_size",
                                          "epochs",        "seed",       "input_size",
                                          "augment"};

}  // namespace

json augment_to_json(const AugmentConfig& c) {
  json j;
  j["p_gaussian_noise"] = c.p_gaussian_noise;
  j["p_flip_horizontal"] = c.p_flip_horizontal;
  j["p_flip_vertical"] = c.p_flip_vertical;
  j["p_affine"] = c.p_affine;
  j["p_elastic"] = c.p_elastic;
  j["p_contrast"] = c.p_contrast;
  j["p_brightness"] = c.p_brightness;
  j["p_gamma"] = c.p_gamma;
  j["p_low_resolution"] = c.p_low_resolution;
  j["p_rician_noise"] = c.p_rician_noise;
  j["p_motion"] = c.p_motion;
  j["p_ghosting"] = c.p_ghosting;
  j["p_spikes"] = c.p_spikes;
  j["p_bias_field"] = c.p_bias_field;
  j["noise_sigma_min"] = c.noise_sigma_min;
  j["noise_sigma_max"] = c.noise_sigma_max;
  j["rotation_deg_max"] = c.rotation_deg_max;
  j["scale_min"] = c.scale_min;
  j["scale_max"] = c.scale_max;
  j["translation_frac_max"] = c.translation_frac_max;
  j["elastic_grid_spacing"] = c.elastic_grid_spacing;
  j["elastic_sigma_min"] = c.elastic_sigma_min;
  j["elastic_sigma_max"] = c.elastic_sigma_max;
  j["contrast_min"] = c.contrast_min;
  j["contrast_max"] = c.contrast_max;
  j["brightness_max"] = c.brightness_max;
  j["gamma_min"] = c.gamma_min;
  j["gamma_max"] = c.gamma_max;
  j["lowres_factor_min"] = c.lowres_factor_min;
  j["lowres_factor_max"] = c.lowres_factor_max;
  j["rician_sigma_min"] = c.rician_sigma_min;
  j["rician_sigma_max"] = c.rician_sigma_max;
  j["motion_shift_max"] = c.motion_shift_max;
  j["motion_weight_max"] = c.motion_weight_max;
  j["ghost_period_min"] = c.ghost_period_min;
  j["ghost_period_max"] = c.ghost_period_max;
  j["ghost_intensity_min"] = c.ghost_intensity_min;
  j["ghost_intensity_max"] = c.ghost_intensity_max;
  j["spike_amp_min"] = c.spike_amp_min;
  j["spike_amp_max"] = c.spike_amp_max;
  j["bias_field_order"] = c.bias_field_order;
  j["bias_coeff_max"] = c.bias_coeff_max;
  j["seed"] = c.seed;
  return j;
}

AugmentConfig augment_from_json(const json& j) {
  check_known_keys(j, kAugmentKeys, "augment config");
  AugmentConfig c;
  get_if(j, "p_gaussian_noise", c.p_gaussian_noise);
  get_if(j, "p_flip_horizontal", c.p_flip_horizontal);
  get_if(j, "p_flip_vertical", c.p_flip_vertical);
  get_if(j, "p_affine", c.p_affine);
  get_if(j, "p_elastic", c.p_elastic);
  get_if(j, "p_contrast", c.p_contrast);
  get_if(j, "p_brightness", c.p_brightness);
  get_if(j, "p_gamma", c.p_gamma);
  get_if(j, "p_low_resolution", c.p_low_resolution);
  get_if(j, "p_rician_noise", c.p_rician_noise);
  get_if(j, "p_motion", c.p_motion);
  get_if(j, "p_ghosting", c.p_ghosting);
  get_if(j, "p_spikes", c.p_spikes);
  get_if(j, "p_bias_field", c.p_bias_field);
  get_if(j, "noise_sigma_min", c.noise_sigma_min);
  get_if(j, "noise_sigma_max", c.noise_sigma_max);
  get_if(j, "rotation_deg_max", c.rotation_deg_max);
  get_if(j, "scale_min", c.scale_min);
  get_if(j, "scale_max", c.scale_max);
  get_if(j, "translation_frac_max", c.translation_frac_max);
  get_if(j, "elastic_grid_spacing", c.elastic_grid_spacing);
  get_if(j, "elastic_sigma_min", c.elastic_sigma_min);
  get_if(j, "elastic_sigma_max", c.elastic_sigma_max);
  get_if(j, "contrast_min", c.contrast_min);
  get_if(j, "contrast_max", c.contrast_max);
  get_if(j, "brightness_max", c.brightness_max);
  get_if(j, "gamma_min", c.gamma_min);
  get_if(j, "gamma_max", c.gamma_max);
  get_if(j, "lowres_factor_min", c.lowres_factor_min);
  get_if(j, "lowres_factor_max", c.lowres_factor_max);
  get_if(j, "rician_sigma_min", c.rician_sigma_min);
  get_if(j, "rician_sigma_max", c.rician_sigma_max);
  get_if(j, "motion_shift_max", c.motion_shift_max);
  get_if(j, "motion_weight_max", c.motion_weight_max);
  get_if(j, "ghost_period_min", c.ghost_period_min);
  get_if(j, "ghost_period_max", c.ghost_period_max);
  get_if(j, "ghost_intensity_min", c.ghost_intensity_min);
  get_if(j, "ghost_intensity_max", c.ghost_intensity_max);
  get_if(j, "spike_amp_min", c.spike_amp_min);
  get_if(j, "spike_amp_max", c.spike_amp_max);
  get_if(j, "bias_field_order", c.bias_field_order);
  get_if(j, "bias_coeff_max", c.bias_coeff_max);
  get_if(j, "seed", c.seed);
  c.validate();
  return c;
}

json train_config_to_json(const net::TrainConfig& c) {
  json j;
  j["arch"] = net::to_string(c.arch);
  j["optimizer"] = net::to_string(c.optimizer);
  j["normalization"] = to_string(c.normalization);
  j["encoding"] = to_string(c.encoding);
  j["learning_rate"] = c.learning_rate;
  j["batch_size"] = c.batch_size;
  j["epochs"] = c.epochs;
  j["seed"] = c.seed;
  j["input_size"] = {c.input_h, c.input_w};
  j["augment"] = augment_to_json(c.augment);
  return j;
}

net::TrainConfig train_config_from_json(const json& j) {
  check_known_keys(j, kTrainKeys, "train config");
  net::TrainConfig c;
  if (j.contains("arch")) c.arch = net::arch_from_string(j.at("arch").get<std::string>());
  if (j.contains("optimizer")) c.optimizer = net::opt_from_string(j.at("optimizer").get<std::string>());
  if (j.contains("normalization"))
    c.normalization = norm_from_string(j.at("normalization").get<std::string>());
  if (j.contains("encoding")) c.encoding = encoding_from_string(j.at("encoding").get<std::string>());
  get_if(j, "learning_rate", c.learning_rate);
  get_if(j, "batch_size", c.batch_size);
  get_if(j, "epochs", c.epochs);
  get_if(j, "seed", c.seed);
  if (j.contains("input_size")) {
    const auto& s = j.at("input_size");
    if (!s.is_array() || s.size() != 2) throw InvalidConfig("input_size must be [h, w]");
    c.input_h = s[0].get<int>();
    c.input_w = s[1].get<int>();
  }
  if (j.contains("augment")) c.augment = augment_from_json(j.at("augment"));
  c.validate();
  return c;
}

}  // namespace dqe
