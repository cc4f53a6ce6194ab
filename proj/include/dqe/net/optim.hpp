#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "dqe/net/layers.hpp"

namespace dqe::net {

template <class T>
class Optimizer {
 public:
  virtual ~Optimizer() = default;
  virtual void step(const std::vector<ParamRef<T>>& params) = 0;
};

template <class T>
class SgdMomentum : public Optimizer<T> {
 public:
  SgdMomentum(double lr, double momentum = 0.95) : lr_(static_cast<T>(lr)), mu_(static_cast<T>(momentum)) {}

  void step(const std::vector<ParamRef<T>>& params) override {
    if (velocity_.empty()) {
      velocity_.resize(params.size());
      for (size_t i = 0; i < params.size(); ++i) velocity_[i].assign(params[i].value->numel(), T(0));
    }
    for (size_t i = 0; i < params.size(); ++i) {
      T* w = params[i].value->data();
      const T* g = params[i].grad->data();
      T* v = velocity_[i].data();
      const size_t n = params[i].value->numel();
      for (size_t j = 0; j < n; ++j) {
        v[j] = mu_ * v[j] + g[j];
        w[j] -= lr_ * v[j];
      }
    }
  }

 private:
  T lr_, mu_;
  std::vector<std::vector<T>> velocity_;
};

template <class T>
class AdamW : public Optimizer<T> {
 public:
  AdamW(double lr, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8,
        double weight_decay = 0.01)
      : lr_(lr), b1_(beta1), b2_(beta2), eps_(eps), wd_(weight_decay) {}

  void step(const std::vector<ParamRef<T>>& params) override {
    if (m_.empty()) {
      m_.resize(params.size());
      v_.resize(params.size());
      for (size_t i = 0; i < params.size(); ++i) {
        m_[i].assign(params[i].value->numel(), T(0));
        v_[i].assign(params[i].value->numel(), T(0));
      }
    }
    ++t_;
    const double bc1 = 1.0 - std::pow(b1_, t_);
    const double bc2 = 1.0 - std::pow(b2_, t_);
    for (size_t i = 0; i < params.size(); ++i) {
      T* w = params[i].value->data();
      const T* g = params[i].grad->data();
      T* m = m_[i].data();
      T* v = v_[i].data();
      const size_t n = params[i].value->numel();
      for (size_t j = 0; j < n; ++j) {
        const double gj = static_cast<double>(g[j]);
        m[j] = static_cast<T>(b1_ * m[j] + (1.0 - b1_) * gj);
        v[j] = static_cast<T>(b2_ * v[j] + (1.0 - b2_) * gj * gj);
        const double mhat = m[j] / bc1;
        const double vhat = v[j] / bc2;
        w[j] -= static_cast<T>(lr_ * (mhat / (std::sqrt(vhat) + eps_) + wd_ * w[j]));
      }
    }
  }

 private:
  double lr_, b1_, b2_, eps_, wd_;
  long t_ = 0;
  std::vector<std::vector<T>> m_, v_;
};

// AdamW core plus the Ranger21 schedule and stabilizers: gradient
// centralization on matrix-shaped parameters, linear warmup over
// min(2000, 0.22*total) steps, linear warmdown over the final 28% of
// training, and lookahead (merge every 5 steps, alpha 0.5).
template <class T>
class Ranger21 : public Optimizer<T> {
 public:
  Ranger21(double lr, long total_steps, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8,
           double weight_decay = 1e-4)
      : lr_(lr), total_(std::max<long>(total_steps, 1)), b1_(beta1), b2_(beta2), eps_(eps),
        wd_(weight_decay) {
    warmup_ = std::min<long>(2000, std::max<long>(1, static_cast<long>(0.22 * static_cast<double>(total_))));
    warmdown_start_ = static_cast<long>(0.72 * static_cast<double>(total_));
  }

  void step(const std::vector<ParamRef<T>>& params) override {
    if (m_.empty()) {
      m_.resize(params.size());
      v_.resize(params.size());
      slow_.resize(params.size());
      for (size_t i = 0; i < params.size(); ++i) {
        m_[i].assign(params[i].value->numel(), T(0));
        v_[i].assign(params[i].value->numel(), T(0));
        slow_[i].assign(params[i].value->data(), params[i].value->data() + params[i].value->numel());
      }
    }
    ++t_;
    const double sched = schedule();
    const double bc1 = 1.0 - std::pow(b1_, t_);
    const double bc2 = 1.0 - std::pow(b2_, t_);

    for (size_t i = 0; i < params.size(); ++i) {
      T* w = params[i].value->data();
      T* g = params[i].grad->data();
      T* m = m_[i].data();
      T* v = v_[i].data();
      const size_t n = params[i].value->numel();

      if (params[i].matrix && params[i].value->rank() >= 2) {
        // gradient centralization: de-mean each output slice
        const size_t rows = static_cast<size_t>(params[i].value->dim(0));
        const size_t cols = n / rows;
        for (size_t r = 0; r < rows; ++r) {
          double mean = 0;
          for (size_t c = 0; c < cols; ++c) mean += static_cast<double>(g[r * cols + c]);
          mean /= static_cast<double>(cols);
          for (size_t c = 0; c < cols; ++c) g[r * cols + c] -= static_cast<T>(mean);
        }
      }

      const double lr_t = lr_ * sched;
      for (size_t j = 0; j < n; ++j) {
        const double gj = static_cast<double>(g[j]);
        m[j] = static_cast<T>(b1_ * m[j] + (1.0 - b1_) * gj);
        v[j] = static_cast<T>(b2_ * v[j] + (1.0 - b2_) * gj * gj);
        const double mhat = m[j] / bc1;
        const double vhat = v[j] / bc2;
        w[j] -= static_cast<T>(lr_t * (mhat / (std::sqrt(vhat) + eps_) + wd_ * w[j]));
      }
    }

    if (t_ % lookahead_every_ == 0) {
      for (size_t i = 0; i < params.size(); ++i) {
        T* w = params[i].value->data();
        T* s = slow_[i].data();
        const size_t n = params[i].value->numel();
        for (size_t j = 0; j < n; ++j) {
          s[j] += static_cast<T>(lookahead_alpha_) * (w[j] - s[j]);
          w[j] = s[j];
        }
      }
    }
  }

  double schedule() const {
    double s = 1.0;
    if (t_ <= warmup_) s = static_cast<double>(t_) / static_cast<double>(warmup_);
    if (t_ > warmdown_start_ && total_ > warmdown_start_) {
      const double frac = static_cast<double>(t_ - warmdown_start_) /
                          static_cast<double>(total_ - warmdown_start_);
      const double floor_lr = 3e-5 / lr_;
      s = std::min(s, 1.0 - (1.0 - std::min(floor_lr, 1.0)) * std::min(frac, 1.0));
    }
    return s;
  }

 private:
  double lr_;
  long total_;
  double b1_, b2_, eps_, wd_;
  long warmup_ = 1;
  long warmdown_start_ = 0;
  long t_ = 0;
  static constexpr int lookahead_every_ = 5;
  static constexpr double lookahead_alpha_ = 0.5;
  std::vector<std::vector<T>> m_, v_, slow_;
};

}  // namespace dqe::net
