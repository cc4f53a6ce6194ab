#include "dqe/net/checkpoint.hpp"

#include <zlib.h>

#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>

#include "dqe/config_json.hpp"

namespace dqe::net {

namespace {

constexpr char kMagic[4] = {'D', 'Q', 'E', 'C'};

struct Writer {
  std::string buf;
  void raw(const void* p, size_t n) { buf.append(static_cast<const char*>(p), n); }
  void u32(uint32_t v) { raw(&v, 4); }
  void u64(uint64_t v) { raw(&v, 8); }
  void f32s(const float* p, size_t n) { raw(p, n * 4); }
  void str(const std::string& s) {
    u32(static_cast<uint32_t>(s.size()));
    raw(s.data(), s.size());
  }
};

struct Reader {
  const char* p;
  const char* end;
  const std::string& path;

  void raw(void* dst, size_t n) {
    if (static_cast<size_t>(end - p) < n)
      throw CorruptCheckpoint("truncated checkpoint: " + path);
    std::memcpy(dst, p, n);
    p += n;
  }
  uint32_t u32() {
    uint32_t v;
    raw(&v, 4);
    return v;
  }
  uint64_t u64() {
    uint64_t v;
    raw(&v, 8);
    return v;
  }
  std::string str() {
    const uint32_t n = u32();
    if (n > (1u << 20)) throw CorruptCheckpoint("implausible string length in " + path);
    std::string s(n, '\0');
    raw(s.data(), n);
    return s;
  }
};

}  // namespace

void save_checkpoint(const Checkpoint& ckpt, const std::string& path) {
  Writer w;
  w.raw(kMagic, 4);
  w.u32(ckpt.format_version);
  w.str(train_config_to_json(ckpt.config).dump());
  w.u64(ckpt.history.size());
  w.f32s(ckpt.history.data(), ckpt.history.size());
  w.u64(ckpt.weights.size());
  for (const auto& t : ckpt.weights) {
    w.str(t.name);
    w.u32(static_cast<uint32_t>(t.shape.size()));
    for (int d : t.shape) w.u32(static_cast<uint32_t>(d));
    w.u64(t.data.size());
    w.f32s(t.data.data(), t.data.size());
  }
  const uint32_t crc = static_cast<uint32_t>(
      crc32(0L, reinterpret_cast<const Bytef*>(w.buf.data()), static_cast<uInt>(w.buf.size())));
  w.u32(crc);

  const std::string tmp = path + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary);
    if (!f) throw IOFailure("cannot create: " + tmp);
    f.write(w.buf.data(), static_cast<std::streamsize>(w.buf.size()));
    if (!f.good()) throw IOFailure("write failed: " + path);
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IOFailure("cannot move into place: " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
  if (!std::filesystem::exists(path)) throw FileNotFound("checkpoint not found: " + path);
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IOFailure("cannot open: " + path);
  std::string buf((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());

  if (buf.size() < 12) throw CorruptCheckpoint("file too small: " + path);
  const uint32_t stored_crc = [&] {
    uint32_t v;
    std::memcpy(&v, buf.data() + buf.size() - 4, 4);
    return v;
  }();
  const uint32_t crc = static_cast<uint32_t>(crc32(
      0L, reinterpret_cast<const Bytef*>(buf.data()), static_cast<uInt>(buf.size() - 4)));
  if (crc != stored_crc) throw CorruptCheckpoint("checksum mismatch: " + path);

  Reader r{buf.data(), buf.data() + buf.size() - 4, path};
  char magic[4];
  r.raw(magic, 4);
  if (std::memcmp(magic, kMagic, 4) != 0) throw CorruptCheckpoint("bad magic: " + path);

  Checkpoint ckpt;
  ckpt.format_version = r.u32();
  if (ckpt.format_version != kCheckpointVersion)
    throw VersionMismatch("checkpoint format v" + std::to_string(ckpt.format_version) +
                          ", this build reads v" + std::to_string(kCheckpointVersion) + ": " + path);

  ckpt.config = train_config_from_json(nlohmann::json::parse(r.str()));
  const uint64_t nh = r.u64();
  ckpt.history.resize(nh);
  r.raw(ckpt.history.data(), nh * 4);

  const uint64_t nt = r.u64();
  ckpt.weights.resize(nt);
  for (auto& t : ckpt.weights) {
    t.name = r.str();
    const uint32_t rank = r.u32();
    if (rank > 8) throw CorruptCheckpoint("implausible tensor rank in " + path);
    t.shape.resize(rank);
    size_t numel = 1;
    for (auto& d : t.shape) {
      d = static_cast<int>(r.u32());
      numel *= static_cast<size_t>(d);
    }
    const uint64_t n = r.u64();
    if (n != numel) throw CorruptCheckpoint("tensor size disagrees with shape in " + path);
    t.data.resize(n);
    r.raw(t.data.data(), n * 4);
  }
  if (r.p != r.end) throw CorruptCheckpoint("trailing bytes in " + path);
  return ckpt;
}

DenseNet<float> build_model(const TrainConfig& config) {
  config.validate();
  return DenseNet<float>(config.input_channels(), config.spec(), derive_seed(config.seed, 0x1417));
}

Checkpoint snapshot_model(DenseNet<float>& model, const TrainConfig& config,
                          std::vector<float> history) {
  Checkpoint ckpt;
  ckpt.config = config;
  ckpt.history = std::move(history);
  auto params = model.parameters();
  auto bufs = model.buffers();
  params.insert(params.end(), bufs.begin(), bufs.end());
  ckpt.weights.reserve(params.size());
  for (const auto& p : params) {
    NamedTensor t;
    t.name = p.name;
    t.shape = p.value->shape();
    t.data.assign(p.value->data(), p.value->data() + p.value->numel());
    ckpt.weights.push_back(std::move(t));
  }
  return ckpt;
}

void restore_model(DenseNet<float>& model, const Checkpoint& ckpt) {
  auto params = model.parameters();
  auto bufs = model.buffers();
  params.insert(params.end(), bufs.begin(), bufs.end());
  if (params.size() != ckpt.weights.size())
    throw CorruptCheckpoint("checkpoint tensor count does not match the model");
  for (size_t i = 0; i < params.size(); ++i) {
    const auto& t = ckpt.weights[i];
    if (t.name != params[i].name || t.data.size() != params[i].value->numel())
      throw CorruptCheckpoint("checkpoint tensor '" + t.name + "' does not match model tensor '" +
                              params[i].name + "'");
    std::copy(t.data.begin(), t.data.end(), params[i].value->data());
  }
}

}  // namespace dqe::net
