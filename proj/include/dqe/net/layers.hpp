#pragma once

#include <cmath>
#include <memory>
#include <string>
#include <vector>

#include "dqe/kernels/conv.hpp"
#include "dqe/kernels/gemm.hpp"
#include "dqe/tensor.hpp"

namespace dqe::net {

template <class T>
using TensorPtr = std::shared_ptr<Tensor<T>>;

template <class T>
TensorPtr<T> make_tensor(std::vector<int> shape) {
  return std::make_shared<Tensor<T>>(std::move(shape));
}

// Parameter handle exposed to optimizers and the checkpoint writer.
template <class T>
struct ParamRef {
  std::string name;
  Tensor<T>* value;
  Tensor<T>* grad;      // null for running statistics
  bool matrix = false;  // rank >= 2, eligible for gradient centralization
};

// --- convolution ----------------------------------------------------------

template <class T>
struct Conv2d {
  int cin, cout, ksize, stride, pad;
  Tensor<T> w;  // [cout, cin*k*k]; no bias, BN follows every conv
  Tensor<T> gw;

  // samples per im2col chunk; fixed so accumulation order (and the result)
  // never depends on thread count
  static constexpr int kChunk = 16;

  Conv2d(int cin_, int cout_, int k, int stride_, int pad_)
      : cin(cin_), cout(cout_), ksize(k), stride(stride_), pad(pad_), w({cout_, cin_ * k * k}),
        gw({cout_, cin_ * k * k}) {}

  void init(Rng& rng) {
    const double fan_in = static_cast<double>(cin) * ksize * ksize;
    const double sd = std::sqrt(2.0 / fan_in);
    for (size_t i = 0; i < w.numel(); ++i) w[i] = static_cast<T>(rng.normal(0.0, sd));
  }

  TensorPtr<T> forward(const TensorPtr<T>& x, bool training) const {
    if (training) input_ = x;
    const int n = x->dim(0), h = x->dim(2), wd = x->dim(3);
    const int oh = kernels::conv_out_dim(h, ksize, stride, pad);
    const int ow = kernels::conv_out_dim(wd, ksize, stride, pad);
    auto y = make_tensor<T>({n, cout, oh, ow});
    const int krows = cin * ksize * ksize;
    const size_t per = static_cast<size_t>(oh) * ow;
    std::vector<T> col;
    for (int s0 = 0; s0 < n; s0 += kChunk) {
      const int sc = std::min(kChunk, n - s0);
      const size_t cols = per * static_cast<size_t>(sc);
      col.resize(static_cast<size_t>(krows) * cols);
      kernels::im2col_batch(x->data() + static_cast<size_t>(s0) * cin * h * wd, sc, cin, h, wd,
                            ksize, ksize, stride, pad, col.data());
      kernels::gemm(false, false, cout, static_cast<int>(cols), krows, T(1), w.data(), col.data(),
                    T(0), /*strided output assembled below*/ scratch_out(cols));
      // scatter GEMM result [cout, sc*per] into NCHW slots
      const T* g = scratch_;
      for (int co = 0; co < cout; ++co)
        for (int s = 0; s < sc; ++s)
          std::copy(g + (static_cast<size_t>(co) * sc + s) * per,
                    g + (static_cast<size_t>(co) * sc + s) * per + per,
                    y->data() + ((static_cast<size_t>(s0 + s) * cout) + co) * per);
    }
    return y;
  }

  TensorPtr<T> backward(const TensorPtr<T>& dy) {
    const auto& x = *input_;
    const int n = x.dim(0), h = x.dim(2), wd = x.dim(3);
    const int oh = dy->dim(2), ow = dy->dim(3);
    auto dx = make_tensor<T>({n, cin, h, wd});
    const int krows = cin * ksize * ksize;
    const size_t per = static_cast<size_t>(oh) * ow;
    std::vector<T> col, dcol, dyt;
    for (int s0 = 0; s0 < n; s0 += kChunk) {
      const int sc = std::min(kChunk, n - s0);
      const size_t cols = per * static_cast<size_t>(sc);
      // gather dy chunk into [cout, sc*per]
      dyt.resize(static_cast<size_t>(cout) * cols);
      for (int co = 0; co < cout; ++co)
        for (int s = 0; s < sc; ++s)
          std::copy(dy->data() + ((static_cast<size_t>(s0 + s) * cout) + co) * per,
                    dy->data() + ((static_cast<size_t>(s0 + s) * cout) + co) * per + per,
                    dyt.data() + (static_cast<size_t>(co) * sc + s) * per);
      // weight gradient: gw += dy_chunk * col^T
      col.resize(static_cast<size_t>(krows) * cols);
      kernels::im2col_batch(x.data() + static_cast<size_t>(s0) * cin * h * wd, sc, cin, h, wd,
                            ksize, ksize, stride, pad, col.data());
      kernels::gemm(false, true, cout, krows, static_cast<int>(cols), T(1), dyt.data(), col.data(),
                    T(1), gw.data());
      // data gradient: dcol = W^T * dy_chunk, then fold back
      dcol.resize(static_cast<size_t>(krows) * cols);
      kernels::gemm(true, false, krows, static_cast<int>(cols), cout, T(1), w.data(), dyt.data(),
                    T(0), dcol.data());
      kernels::col2im_batch(dcol.data(), sc, cin, h, wd, ksize, ksize, stride, pad,
                            dx->data() + static_cast<size_t>(s0) * cin * h * wd);
    }
    input_.reset();
    return dx;
  }

  void collect(const std::string& prefix, std::vector<ParamRef<T>>& out) {
    out.push_back({prefix + ".weight", &w, &gw, true});
  }

 private:
  mutable TensorPtr<T> input_;
  mutable std::vector<T> scratch_vec_;
  mutable T* scratch_ = nullptr;

  T* scratch_out(size_t cols) const {
    scratch_vec_.resize(static_cast<size_t>(cout) * cols);
    scratch_ = scratch_vec_.data();
    return scratch_;
  }
};

// --- batch normalization ---------------------------------------------------

template <class T>
struct BatchNorm2d {
  int ch;
  T eps = static_cast<T>(1e-5);
  T momentum = static_cast<T>(0.1);
  Tensor<T> gamma, beta, ggamma, gbeta;
  Tensor<T> running_mean, running_var;

  explicit BatchNorm2d(int ch_)
      : ch(ch_), gamma({ch_}), beta({ch_}), ggamma({ch_}), gbeta({ch_}), running_mean({ch_}),
        running_var({ch_}) {
    gamma.fill(T(1));
    running_var.fill(T(1));
  }

  TensorPtr<T> forward(const TensorPtr<T>& x, bool training) const {
    const int n = x->dim(0), h = x->dim(2), w = x->dim(3);
    const size_t plane = static_cast<size_t>(h) * w;
    const size_t m = static_cast<size_t>(n) * plane;
    auto y = make_tensor<T>(x->shape());
    if (training) {
      input_ = x;
      mean_.assign(static_cast<size_t>(ch), T(0));
      invstd_.assign(static_cast<size_t>(ch), T(0));
    }
#pragma omp parallel for schedule(static)
    for (int c = 0; c < ch; ++c) {
      T mu, inv;
      if (training) {
        // two-pass moments over (N, H, W), serial per channel
        double sum = 0;
        for (int s = 0; s < n; ++s) {
          const T* p = x->data() + (static_cast<size_t>(s) * ch + c) * plane;
          for (size_t i = 0; i < plane; ++i) sum += static_cast<double>(p[i]);
        }
        mu = static_cast<T>(sum / static_cast<double>(m));
        double ss = 0;
        for (int s = 0; s < n; ++s) {
          const T* p = x->data() + (static_cast<size_t>(s) * ch + c) * plane;
          for (size_t i = 0; i < plane; ++i) {
            const double d = static_cast<double>(p[i]) - static_cast<double>(mu);
            ss += d * d;
          }
        }
        const double var = ss / static_cast<double>(m);
        inv = static_cast<T>(1.0 / std::sqrt(var + static_cast<double>(eps)));
        mean_[static_cast<size_t>(c)] = mu;
        invstd_[static_cast<size_t>(c)] = inv;
        const double var_unbiased = m > 1 ? ss / static_cast<double>(m - 1) : var;
        running_mean[static_cast<size_t>(c)] =
            (T(1) - momentum) * running_mean[static_cast<size_t>(c)] + momentum * mu;
        running_var[static_cast<size_t>(c)] =
            (T(1) - momentum) * running_var[static_cast<size_t>(c)] + momentum * static_cast<T>(var_unbiased);
      } else {
        mu = running_mean[static_cast<size_t>(c)];
        inv = static_cast<T>(1.0 / std::sqrt(static_cast<double>(running_var[static_cast<size_t>(c)]) +
                                             static_cast<double>(eps)));
      }
      const T g = gamma[static_cast<size_t>(c)], b = beta[static_cast<size_t>(c)];
      for (int s = 0; s < n; ++s) {
        const T* p = x->data() + (static_cast<size_t>(s) * ch + c) * plane;
        T* q = y->data() + (static_cast<size_t>(s) * ch + c) * plane;
        for (size_t i = 0; i < plane; ++i) q[i] = g * ((p[i] - mu) * inv) + b;
      }
    }
    return y;
  }

  TensorPtr<T> backward(const TensorPtr<T>& dy) {
    const auto& x = *input_;
    const int n = x.dim(0), h = x.dim(2), w = x.dim(3);
    const size_t plane = static_cast<size_t>(h) * w;
    const size_t m = static_cast<size_t>(n) * plane;
    auto dx = make_tensor<T>(x.shape());
#pragma omp parallel for schedule(static)
    for (int c = 0; c < ch; ++c) {
      const T mu = mean_[static_cast<size_t>(c)];
      const T inv = invstd_[static_cast<size_t>(c)];
      double dg = 0, db = 0;
      for (int s = 0; s < n; ++s) {
        const T* px = x.data() + (static_cast<size_t>(s) * ch + c) * plane;
        const T* pd = dy->data() + (static_cast<size_t>(s) * ch + c) * plane;
        for (size_t i = 0; i < plane; ++i) {
          const T xhat = (px[i] - mu) * inv;
          dg += static_cast<double>(pd[i]) * static_cast<double>(xhat);
          db += static_cast<double>(pd[i]);
        }
      }
      ggamma[static_cast<size_t>(c)] += static_cast<T>(dg);
      gbeta[static_cast<size_t>(c)] += static_cast<T>(db);
      const T g = gamma[static_cast<size_t>(c)];
      const T k1 = static_cast<T>(db / static_cast<double>(m));
      const T k2 = static_cast<T>(dg / static_cast<double>(m));
      for (int s = 0; s < n; ++s) {
        const T* px = x.data() + (static_cast<size_t>(s) * ch + c) * plane;
        const T* pd = dy->data() + (static_cast<size_t>(s) * ch + c) * plane;
        T* pq = dx->data() + (static_cast<size_t>(s) * ch + c) * plane;
        for (size_t i = 0; i < plane; ++i) {
          const T xhat = (px[i] - mu) * inv;
          pq[i] = g * inv * (pd[i] - k1 - xhat * k2);
        }
      }
    }
    input_.reset();
    return dx;
  }

  void collect(const std::string& prefix, std::vector<ParamRef<T>>& out) {
    out.push_back({prefix + ".gamma", &gamma, &ggamma, false});
    out.push_back({prefix + ".beta", &beta, &gbeta, false});
  }
  void collect_buffers(const std::string& prefix, std::vector<ParamRef<T>>& out) {
    out.push_back({prefix + ".running_mean", &running_mean, nullptr, false});
    out.push_back({prefix + ".running_var", &running_var, nullptr, false});
  }

 private:
  mutable TensorPtr<T> input_;
  mutable std::vector<T> mean_, invstd_;
};

// --- activations / pooling --------------------------------------------------

// In-place ReLU; backward masks by the (cached) output sign.
template <class T>
struct ReLU {
  TensorPtr<T> forward(const TensorPtr<T>& x, bool training) const {
    T* p = x->data();
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < static_cast<long long>(x->numel()); ++i)
      if (p[i] < T(0)) p[i] = T(0);
    if (training) output_ = x;
    return x;
  }
  TensorPtr<T> backward(const TensorPtr<T>& dy) {
    const T* y = output_->data();
    T* d = dy->data();
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < static_cast<long long>(dy->numel()); ++i)
      if (y[i] <= T(0)) d[i] = T(0);
    output_.reset();
    return dy;
  }

 private:
  mutable TensorPtr<T> output_;
};

template <class T>
struct MaxPool2d {
  int ksize, stride, pad;
  MaxPool2d(int k, int s, int p) : ksize(k), stride(s), pad(p) {}

  TensorPtr<T> forward(const TensorPtr<T>& x, bool training) const {
    const int n = x->dim(0), c = x->dim(1), h = x->dim(2), w = x->dim(3);
    const int oh = kernels::conv_out_dim(h, ksize, stride, pad);
    const int ow = kernels::conv_out_dim(w, ksize, stride, pad);
    auto y = make_tensor<T>({n, c, oh, ow});
    if (training) {
      argmax_.assign(y->numel(), 0);
      in_shape_ = x->shape();
    }
    const int planes = n * c;
#pragma omp parallel for schedule(static)
    for (int p = 0; p < planes; ++p) {
      const T* src = x->data() + static_cast<size_t>(p) * h * w;
      T* dst = y->data() + static_cast<size_t>(p) * oh * ow;
      for (int oy = 0; oy < oh; ++oy) {
        for (int ox = 0; ox < ow; ++ox) {
          T best{};
          int besti = -1;
          for (int ky = 0; ky < ksize; ++ky) {
            const int yy = oy * stride - pad + ky;
            if (yy < 0 || yy >= h) continue;
            for (int kx = 0; kx < ksize; ++kx) {
              const int xx = ox * stride - pad + kx;
              if (xx < 0 || xx >= w) continue;
              const T v = src[static_cast<size_t>(yy) * w + xx];
              if (besti < 0 || v > best) {
                best = v;
                besti = yy * w + xx;
              }
            }
          }
          dst[static_cast<size_t>(oy) * ow + ox] = best;
          if (training) argmax_[static_cast<size_t>(p) * oh * ow + static_cast<size_t>(oy) * ow + ox] = besti;
        }
      }
    }
    return y;
  }

  TensorPtr<T> backward(const TensorPtr<T>& dy) {
    auto dx = make_tensor<T>(in_shape_);
    const int n = in_shape_[0], c = in_shape_[1], h = in_shape_[2], w = in_shape_[3];
    const int oh = dy->dim(2), ow = dy->dim(3);
    const int planes = n * c;
#pragma omp parallel for schedule(static)
    for (int p = 0; p < planes; ++p) {
      const T* d = dy->data() + static_cast<size_t>(p) * oh * ow;
      T* q = dx->data() + static_cast<size_t>(p) * h * w;
      for (size_t i = 0; i < static_cast<size_t>(oh) * ow; ++i)
        q[argmax_[static_cast<size_t>(p) * oh * ow + i]] += d[i];
    }
    argmax_.clear();
    return dx;
  }

 private:
  mutable std::vector<int> argmax_;
  mutable std::vector<int> in_shape_;
};

// 2x2/2 average pooling (transition layers); edge windows are clipped.
template <class T>
struct AvgPool2d {
  TensorPtr<T> forward(const TensorPtr<T>& x, bool training) const {
    const int n = x->dim(0), c = x->dim(1), h = x->dim(2), w = x->dim(3);
    const int oh = h / 2, ow = w / 2;
    if (training) in_shape_ = x->shape();
    auto y = make_tensor<T>({n, c, oh, ow});
    const int planes = n * c;
#pragma omp parallel for schedule(static)
    for (int p = 0; p < planes; ++p) {
      const T* src = x->data() + static_cast<size_t>(p) * h * w;
      T* dst = y->data() + static_cast<size_t>(p) * oh * ow;
      for (int oy = 0; oy < oh; ++oy)
        for (int ox = 0; ox < ow; ++ox) {
          const size_t base = static_cast<size_t>(2 * oy) * w + 2 * ox;
          dst[static_cast<size_t>(oy) * ow + ox] =
              (src[base] + src[base + 1] + src[base + w] + src[base + w + 1]) / T(4);
        }
    }
    return y;
  }

  TensorPtr<T> backward(const TensorPtr<T>& dy) {
    auto dx = make_tensor<T>(in_shape_);
    const int n = in_shape_[0], c = in_shape_[1], h = in_shape_[2], w = in_shape_[3];
    const int oh = dy->dim(2), ow = dy->dim(3);
    const int planes = n * c;
#pragma omp parallel for schedule(static)
    for (int p = 0; p < planes; ++p) {
      const T* d = dy->data() + static_cast<size_t>(p) * oh * ow;
      T* q = dx->data() + static_cast<size_t>(p) * h * w;
      for (int oy = 0; oy < oh; ++oy)
        for (int ox = 0; ox < ow; ++ox) {
          const T v = d[static_cast<size_t>(oy) * ow + ox] / T(4);
          const size_t base = static_cast<size_t>(2 * oy) * w + 2 * ox;
          q[base] += v;
          q[base + 1] += v;
          q[base + w] += v;
          q[base + w + 1] += v;
        }
    }
    return dx;
  }

 private:
  mutable std::vector<int> in_shape_;
};

template <class T>
struct GlobalAvgPool {
  TensorPtr<T> forward(const TensorPtr<T>& x, bool training) const {
    const int n = x->dim(0), c = x->dim(1), h = x->dim(2), w = x->dim(3);
    if (training) in_shape_ = x->shape();
    auto y = make_tensor<T>({n, c});
    const size_t plane = static_cast<size_t>(h) * w;
#pragma omp parallel for schedule(static)
    for (int s = 0; s < n; ++s)
      for (int cc = 0; cc < c; ++cc) {
        const T* p = x->data() + (static_cast<size_t>(s) * c + cc) * plane;
        double sum = 0;
        for (size_t i = 0; i < plane; ++i) sum += static_cast<double>(p[i]);
        (*y)[static_cast<size_t>(s) * c + cc] = static_cast<T>(sum / static_cast<double>(plane));
      }
    return y;
  }

  TensorPtr<T> backward(const TensorPtr<T>& dy) {
    auto dx = make_tensor<T>(in_shape_);
    const int n = in_shape_[0], c = in_shape_[1], h = in_shape_[2], w = in_shape_[3];
    const size_t plane = static_cast<size_t>(h) * w;
    const T scale = static_cast<T>(1.0 / static_cast<double>(plane));
#pragma omp parallel for schedule(static)
    for (int s = 0; s < n; ++s)
      for (int cc = 0; cc < c; ++cc) {
        const T v = (*dy)[static_cast<size_t>(s) * c + cc] * scale;
        T* q = dx->data() + (static_cast<size_t>(s) * c + cc) * plane;
        for (size_t i = 0; i < plane; ++i) q[i] = v;
      }
    return dx;
  }

 private:
  mutable std::vector<int> in_shape_;
};

template <class T>
struct Linear {
  int in, out;
  Tensor<T> w, b, gw, gb;  // w: [out, in]

  Linear(int in_, int out_) : in(in_), out(out_), w({out_, in_}), b({out_}), gw({out_, in_}), gb({out_}) {}

  void init(Rng& rng) {
    const double sd = 1.0 / std::sqrt(static_cast<double>(in));
    for (size_t i = 0; i < w.numel(); ++i) w[i] = static_cast<T>(rng.normal(0.0, sd));
    b.fill(T(0));
  }

  TensorPtr<T> forward(const TensorPtr<T>& x, bool training) const {
    if (training) input_ = x;
    const int n = x->dim(0);
    auto y = make_tensor<T>({n, out});
    kernels::gemm(false, true, n, out, in, T(1), x->data(), w.data(), T(0), y->data());
    for (int s = 0; s < n; ++s)
      for (int o = 0; o < out; ++o) (*y)[static_cast<size_t>(s) * out + o] += b[static_cast<size_t>(o)];
    return y;
  }

  TensorPtr<T> backward(const TensorPtr<T>& dy) {
    const int n = dy->dim(0);
    kernels::gemm(true, false, out, in, n, T(1), dy->data(), input_->data(), T(1), gw.data());
    for (int s = 0; s < n; ++s)
      for (int o = 0; o < out; ++o) gb[static_cast<size_t>(o)] += (*dy)[static_cast<size_t>(s) * out + o];
    auto dx = make_tensor<T>(input_->shape());
    kernels::gemm(false, false, n, in, out, T(1), dy->data(), w.data(), T(0), dx->data());
    input_.reset();
    return dx;
  }

  void collect(const std::string& prefix, std::vector<ParamRef<T>>& out_refs) {
    out_refs.push_back({prefix + ".weight", &w, &gw, true});
    out_refs.push_back({prefix + ".bias", &b, &gb, false});
  }

 private:
  mutable TensorPtr<T> input_;
};

// --- channel concat helpers --------------------------------------------------

template <class T>
TensorPtr<T> concat_channels(const Tensor<T>& a, const Tensor<T>& b) {
  const int n = a.dim(0), ca = a.dim(1), cb = b.dim(1), h = a.dim(2), w = a.dim(3);
  auto y = make_tensor<T>({n, ca + cb, h, w});
  const size_t plane = static_cast<size_t>(h) * w;
#pragma omp parallel for schedule(static)
  for (int s = 0; s < n; ++s) {
    std::copy(a.data() + static_cast<size_t>(s) * ca * plane,
              a.data() + static_cast<size_t>(s + 1) * ca * plane,
              y->data() + static_cast<size_t>(s) * (ca + cb) * plane);
    std::copy(b.data() + static_cast<size_t>(s) * cb * plane,
              b.data() + static_cast<size_t>(s + 1) * cb * plane,
              y->data() + static_cast<size_t>(s) * (ca + cb) * plane + static_cast<size_t>(ca) * plane);
  }
  return y;
}

template <class T>
TensorPtr<T> slice_channels(const Tensor<T>& x, int c0, int c1) {
  const int n = x.dim(0), c = x.dim(1), h = x.dim(2), w = x.dim(3);
  auto y = make_tensor<T>({n, c1 - c0, h, w});
  const size_t plane = static_cast<size_t>(h) * w;
#pragma omp parallel for schedule(static)
  for (int s = 0; s < n; ++s)
    std::copy(x.data() + (static_cast<size_t>(s) * c + c0) * plane,
              x.data() + (static_cast<size_t>(s) * c + c1) * plane,
              y->data() + static_cast<size_t>(s) * (c1 - c0) * plane);
  return y;
}

template <class T>
void add_into(Tensor<T>& acc, const Tensor<T>& x) {
  T* a = acc.data();
  const T* p = x.data();
#pragma omp parallel for schedule(static)
  for (long long i = 0; i < static_cast<long long>(acc.numel()); ++i) a[i] += p[i];
}

}  // namespace dqe::net
