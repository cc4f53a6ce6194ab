#include "dqe/net/config.hpp"

#include <set>

namespace dqe::net {

const char* to_string(Arch a) { return a == Arch::dense121 ? "dense121" : "dense201"; }
const char* to_string(OptKind o) {
  switch (o) {
    case OptKind::ranger21: return "ranger21";
    case OptKind::adamw: return "adamw";
    default: return "sgd_momentum";
  }
}

Arch arch_from_string(const std::string& s) {
  if (s == "dense121") return Arch::dense121;
  if (s == "dense201") return Arch::dense201;
  throw InvalidConfig("unknown arch: " + s);
}

OptKind opt_from_string(const std::string& s) {
  if (s == "ranger21") return OptKind::ranger21;
  if (s == "adamw") return OptKind::adamw;
  if (s == "sgd_momentum") return OptKind::sgd_momentum;
  throw InvalidConfig("unknown optimizer: " + s);
}

void TrainConfig::validate() const {
  if (batch_size < 1) throw InvalidConfig("batch_size must be >= 1");
  if (epochs < 1) throw InvalidConfig("epochs must be >= 1");
  if (!(learning_rate > 0)) throw InvalidConfig("learning_rate must be positive");
  if (input_h < 8 || input_w < 8) throw InvalidConfig("input size must be at least 8x8");
  augment.validate();
}

GridSelection GridSelection::full() {
  GridSelection s;
  s.archs = {Arch::dense121, Arch::dense201};
  s.optimizers = {OptKind::ranger21, OptKind::adamw, OptKind::sgd_momentum};
  s.normalizations = {NormMethod::minmax, NormMethod::percentile};
  s.encodings = {LabelEncoding::single, LabelEncoding::brats};
  return s;
}

namespace {

template <class T>
void check_axis(const std::vector<T>& axis, const char* name) {
  if (axis.empty()) throw InvalidSelection(std::string("empty axis: ") + name);
  std::set<int> seen;
  for (const auto& v : axis)
    if (!seen.insert(static_cast<int>(v)).second)
      throw InvalidSelection(std::string("duplicate value on axis: ") + name);
}

}  // namespace

std::vector<TrainConfig> hyperparameter_grid(const GridSelection& sel, const TrainConfig& base) {
  check_axis(sel.archs, "arch");
  check_axis(sel.optimizers, "optimizer");
  check_axis(sel.normalizations, "normalization");
  check_axis(sel.encodings, "encoding");

  std::vector<TrainConfig> out;
  out.reserve(sel.archs.size() * sel.optimizers.size() * sel.normalizations.size() *
              sel.encodings.size());
  for (Arch a : sel.archs)
    for (OptKind o : sel.optimizers)
      for (NormMethod n : sel.normalizations)
        for (LabelEncoding e : sel.encodings) {
          TrainConfig c = base;
          c.arch = a;
          c.optimizer = o;
          c.normalization = n;
          c.encoding = e;
          out.push_back(c);
        }
  return out;
}

}  // namespace dqe::net
