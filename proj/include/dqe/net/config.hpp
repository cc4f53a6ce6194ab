#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dqe/augment.hpp"
#include "dqe/net/densenet.hpp"
#include "dqe/volume.hpp"

namespace dqe::net {

enum class Arch { dense121, dense201 };
enum class OptKind { ranger21, adamw, sgd_momentum };

const char* to_string(Arch a);
const char* to_string(OptKind o);
Arch arch_from_string(const std::string& s);
OptKind opt_from_string(const std::string& s);

// One point in the paper's variation grid plus the training constants.
struct TrainConfig {
  Arch arch = Arch::dense121;
  OptKind optimizer = OptKind::ranger21;
  NormMethod normalization = NormMethod::percentile;
  LabelEncoding encoding = LabelEncoding::brats;
  double learning_rate = 1e-3;
  int batch_size = 80;
  int epochs = 500;
  uint64_t seed = 0;
  int input_h = 64, input_w = 64;
  AugmentConfig augment;

  int input_channels() const { return 4 + label_channel_count(encoding); }
  DenseNetSpec spec() const {
    return arch == Arch::dense121 ? DenseNetSpec::dense121() : DenseNetSpec::dense201();
  }
  void validate() const;  // throws InvalidConfig
};

// Axis subsets for hyperparameter sweeps; empty axes are invalid.
struct GridSelection {
  std::vector<Arch> archs;
  std::vector<OptKind> optimizers;
  std::vector<NormMethod> normalizations;
  std::vector<LabelEncoding> encodings;

  static GridSelection full();
};

// Cartesian product in declaration order (arch-major), constants from `base`.
std::vector<TrainConfig> hyperparameter_grid(const GridSelection& sel,
                                             const TrainConfig& base = TrainConfig{});

}  // namespace dqe::net
