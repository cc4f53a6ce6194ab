#pragma once

#include <string>
#include <vector>

#include "dqe/net/config.hpp"
#include "dqe/net/densenet.hpp"

namespace dqe::net {

constexpr uint32_t kCheckpointVersion = 1;

struct NamedTensor {
  std::string name;
  std::vector<int> shape;
  std::vector<float> data;
};

// Round-trippable trained-model artifact: config, per-epoch training loss,
// and all parameters plus BN running statistics. The on-disk form is a
// little-endian binary archive with a trailing CRC32; save/load/save is
// byte-stable.
struct Checkpoint {
  uint32_t format_version = kCheckpointVersion;
  TrainConfig config;
  std::vector<float> history;
  std::vector<NamedTensor> weights;
};

void save_checkpoint(const Checkpoint& ckpt, const std::string& path);
Checkpoint load_checkpoint(const std::string& path);

// Fresh model with the config's topology, deterministically initialized
// from config.seed.
DenseNet<float> build_model(const TrainConfig& config);

Checkpoint snapshot_model(DenseNet<float>& model, const TrainConfig& config,
                          std::vector<float> history);
void restore_model(DenseNet<float>& model, const Checkpoint& ckpt);

}  // namespace dqe::net
