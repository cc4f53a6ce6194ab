#pragma once

#include <string>
#include <vector>

#include "dqe/net/layers.hpp"

namespace dqe::net {

// Dense-block topology. The two paper variants share growth 32 and a
// 7x7/2 stem with 3x3/2 max pooling; the tiny variant exists for gradient
// checks and fast tests.
struct DenseNetSpec {
  int init_features = 64;
  int growth = 32;
  int bottleneck = 4;  // 1x1 conv widens to bottleneck*growth
  std::vector<int> block_layers{6, 12, 24, 16};
  int stem_kernel = 7, stem_stride = 2, stem_pad = 3;
  bool stem_pool = true;

  static DenseNetSpec dense121() { return {}; }
  static DenseNetSpec dense201() {
    DenseNetSpec s;
    s.block_layers = {6, 12, 48, 32};
    return s;
  }
  static DenseNetSpec tiny() {
    DenseNetSpec s;
    s.init_features = 8;
    s.growth = 4;
    s.block_layers = {2, 2};
    s.stem_kernel = 3;
    s.stem_stride = 1;
    s.stem_pad = 1;
    s.stem_pool = false;
    return s;
  }
};

template <class T>
struct DenseLayer {
  BatchNorm2d<T> norm1;
  ReLU<T> relu1;
  Conv2d<T> conv1;
  BatchNorm2d<T> norm2;
  ReLU<T> relu2;
  Conv2d<T> conv2;

  DenseLayer(int cin, int growth, int bottleneck)
      : norm1(cin), conv1(cin, bottleneck * growth, 1, 1, 0), norm2(bottleneck * growth),
        conv2(bottleneck * growth, growth, 3, 1, 1) {}

  TensorPtr<T> forward(const TensorPtr<T>& features, bool training) const {
    auto y = norm1.forward(features, training);
    y = relu1.forward(y, training);
    y = conv1.forward(y, training);
    y = norm2.forward(y, training);
    y = relu2.forward(y, training);
    return conv2.forward(y, training);
  }

  TensorPtr<T> backward(const TensorPtr<T>& dout) {
    auto d = conv2.backward(dout);
    d = relu2.backward(d);
    d = norm2.backward(d);
    d = conv1.backward(d);
    d = relu1.backward(d);
    return norm1.backward(d);
  }

  void init(Rng& rng) {
    conv1.init(rng);
    conv2.init(rng);
  }
  void collect(const std::string& p, std::vector<ParamRef<T>>& out) {
    norm1.collect(p + ".norm1", out);
    conv1.collect(p + ".conv1", out);
    norm2.collect(p + ".norm2", out);
    conv2.collect(p + ".conv2", out);
  }
  void collect_buffers(const std::string& p, std::vector<ParamRef<T>>& out) {
    norm1.collect_buffers(p + ".norm1", out);
    norm2.collect_buffers(p + ".norm2", out);
  }
};

template <class T>
struct DenseBlock {
  int c_in, growth;
  std::vector<DenseLayer<T>> layers;

  DenseBlock(int cin, int n_layers, int growth_, int bottleneck) : c_in(cin), growth(growth_) {
    layers.reserve(static_cast<size_t>(n_layers));
    for (int i = 0; i < n_layers; ++i)
      layers.emplace_back(cin + i * growth_, growth_, bottleneck);
  }

  int c_out() const { return c_in + static_cast<int>(layers.size()) * growth; }

  TensorPtr<T> forward(TensorPtr<T> features, bool training) const {
    for (const auto& layer : layers) {
      auto out = layer.forward(features, training);
      features = concat_channels(*features, *out);
    }
    return features;
  }

  TensorPtr<T> backward(TensorPtr<T> dfeat) {
    for (size_t i = layers.size(); i-- > 0;) {
      const int c = c_in + static_cast<int>(i) * growth;
      auto dout = slice_channels(*dfeat, c, c + growth);
      auto dprev = slice_channels(*dfeat, 0, c);
      auto contrib = layers[i].backward(dout);
      add_into(*dprev, *contrib);
      dfeat = dprev;
    }
    return dfeat;
  }

  void init(Rng& rng) {
    for (auto& l : layers) l.init(rng);
  }
  void collect(const std::string& p, std::vector<ParamRef<T>>& out) {
    for (size_t i = 0; i < layers.size(); ++i)
      layers[i].collect(p + ".layer" + std::to_string(i), out);
  }
  void collect_buffers(const std::string& p, std::vector<ParamRef<T>>& out) {
    for (size_t i = 0; i < layers.size(); ++i)
      layers[i].collect_buffers(p + ".layer" + std::to_string(i), out);
  }
};

template <class T>
struct Transition {
  BatchNorm2d<T> norm;
  ReLU<T> relu;
  Conv2d<T> conv;
  AvgPool2d<T> pool;

  Transition(int cin, int cout) : norm(cin), conv(cin, cout, 1, 1, 0) {}

  TensorPtr<T> forward(const TensorPtr<T>& x, bool training) const {
    auto y = norm.forward(x, training);
    y = relu.forward(y, training);
    y = conv.forward(y, training);
    return pool.forward(y, training);
  }
  TensorPtr<T> backward(const TensorPtr<T>& dy) {
    auto d = pool.backward(dy);
    d = conv.backward(d);
    d = relu.backward(d);
    return norm.backward(d);
  }
  void init(Rng& rng) { conv.init(rng); }
  void collect(const std::string& p, std::vector<ParamRef<T>>& out) {
    norm.collect(p + ".norm", out);
    conv.collect(p + ".conv", out);
  }
  void collect_buffers(const std::string& p, std::vector<ParamRef<T>>& out) {
    norm.collect_buffers(p + ".norm", out);
  }
};

// Densely connected convolutional regression network with a single linear
// output head. Inference forward passes touch no mutable state, so a built
// model can serve predictions from multiple threads.
template <class T>
class DenseNet {
 public:
  DenseNet(int in_channels, DenseNetSpec spec, uint64_t init_seed)
      : in_channels_(in_channels), spec_(std::move(spec)),
        conv0_(in_channels, spec_.init_features, spec_.stem_kernel, spec_.stem_stride, spec_.stem_pad),
        norm0_(spec_.init_features), pool0_(3, 2, 1), head_(0, 0) /* re-made below */ {
    int c = spec_.init_features;
    for (size_t b = 0; b < spec_.block_layers.size(); ++b) {
      blocks_.emplace_back(c, spec_.block_layers[b], spec_.growth, spec_.bottleneck);
      c = blocks_.back().c_out();
      if (b + 1 < spec_.block_layers.size()) {
        transitions_.emplace_back(c, c / 2);
        c /= 2;
      }
    }
    norm5_ = std::make_unique<BatchNorm2d<T>>(c);
    head_ = Linear<T>(c, 1);

    Rng rng(init_seed);
    conv0_.init(rng);
    for (auto& b : blocks_) b.init(rng);
    for (auto& t : transitions_) t.init(rng);
    head_.init(rng);
  }

  int in_channels() const { return in_channels_; }
  const DenseNetSpec& spec() const { return spec_; }

  // input: [N, in_channels, H, W]; returns N scalar predictions
  std::vector<T> forward(TensorPtr<T> x, bool training) const {
    auto y = conv0_.forward(x, training);
    y = norm0_.forward(y, training);
    y = relu0_.forward(y, training);
    if (spec_.stem_pool) y = pool0_.forward(y, training);
    for (size_t b = 0; b < blocks_.size(); ++b) {
      y = blocks_[b].forward(y, training);
      if (b < transitions_.size()) y = transitions_[b].forward(y, training);
    }
    y = norm5_->forward(y, training);
    y = relu5_.forward(y, training);
    y = gap_.forward(y, training);
    y = head_.forward(y, training);
    std::vector<T> out(static_cast<size_t>(y->dim(0)));
    for (size_t i = 0; i < out.size(); ++i) out[i] = (*y)[i];
    return out;
  }

  // dpred: d(loss)/d(prediction) per sample; call right after a training
  // forward pass. Gradients accumulate until zero_grad().
  void backward(const std::vector<T>& dpred) {
    auto d = make_tensor<T>({static_cast<int>(dpred.size()), 1});
    for (size_t i = 0; i < dpred.size(); ++i) (*d)[i] = dpred[i];
    auto g = head_.backward(d);
    g = gap_.backward(g);
    g = relu5_.backward(g);
    g = norm5_->backward(g);
    for (size_t b = blocks_.size(); b-- > 0;) {
      if (b < transitions_.size()) g = transitions_[b].backward(g);
      g = blocks_[b].backward(g);
    }
    if (spec_.stem_pool) g = pool0_.backward(g);
    g = relu0_.backward(g);
    g = norm0_.backward(g);
    conv0_.backward(g);
  }

  std::vector<ParamRef<T>> parameters() {
    std::vector<ParamRef<T>> out;
    conv0_.collect("conv0", out);
    norm0_.collect("norm0", out);
    for (size_t b = 0; b < blocks_.size(); ++b) {
      blocks_[b].collect("block" + std::to_string(b), out);
      if (b < transitions_.size()) transitions_[b].collect("trans" + std::to_string(b), out);
    }
    norm5_->collect("norm5", out);
    head_.collect("head", out);
    return out;
  }

  std::vector<ParamRef<T>> buffers() {
    std::vector<ParamRef<T>> out;
    norm0_.collect_buffers("norm0", out);
    for (size_t b = 0; b < blocks_.size(); ++b) {
      blocks_[b].collect_buffers("block" + std::to_string(b), out);
      if (b < transitions_.size()) transitions_[b].collect_buffers("trans" + std::to_string(b), out);
    }
    norm5_->collect_buffers("norm5", out);
    return out;
  }

  void zero_grad() {
    for (auto& p : parameters()) p.grad->fill(T(0));
  }

  size_t parameter_count() {
    size_t n = 0;
    for (auto& p : parameters()) n += p.value->numel();
    return n;
  }

 private:
  int in_channels_;
  DenseNetSpec spec_;
  Conv2d<T> conv0_;
  BatchNorm2d<T> norm0_;
  ReLU<T> relu0_;
  MaxPool2d<T> pool0_;
  std::vector<DenseBlock<T>> blocks_;
  std::vector<Transition<T>> transitions_;
  std::unique_ptr<BatchNorm2d<T>> norm5_;
  ReLU<T> relu5_;
  GlobalAvgPool<T> gap_;
  Linear<T> head_;
};

}  // namespace dqe::net
