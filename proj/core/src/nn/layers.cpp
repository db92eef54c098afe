#include "gprd/nn/layers.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <iostream>

#include "gprd/errors.hpp"

namespace gprd::nn {

namespace {

template <typename T>
using RowMatrix = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename T>
using MapMatrix = Eigen::Map<RowMatrix<T>>;
template <typename T>
using ConstMapMatrix = Eigen::Map<const RowMatrix<T>>;

// im2col for a 3x3 kernel with padding 1: rows (ci, ky, kx), columns (y, x).
template <typename T>
void im2col3(const T* x, std::size_t channels, std::size_t h, std::size_t w, T* col) {
  const std::size_t plane = h * w;
  for (std::size_t ci = 0; ci < channels; ++ci) {
    const T* src = x + ci * plane;
    for (std::size_t ky = 0; ky < 3; ++ky) {
      for (std::size_t kx = 0; kx < 3; ++kx) {
        T* dst = col + ((ci * 3 + ky) * 3 + kx) * plane;
        for (std::size_t y = 0; y < h; ++y) {
          const std::ptrdiff_t sy = static_cast<std::ptrdiff_t>(y + ky) - 1;
          T* row = dst + y * w;
          if (sy < 0 || sy >= static_cast<std::ptrdiff_t>(h)) {
            std::fill_n(row, w, T{0});
            continue;
          }
          const T* srow = src + static_cast<std::size_t>(sy) * w;
          for (std::size_t xx = 0; xx < w; ++xx) {
            const std::ptrdiff_t sx = static_cast<std::ptrdiff_t>(xx + kx) - 1;
            row[xx] = (sx < 0 || sx >= static_cast<std::ptrdiff_t>(w))
                          ? T{0}
                          : srow[static_cast<std::size_t>(sx)];
          }
        }
      }
    }
  }
}

template <typename T>
void col2im3(const T* col, std::size_t channels, std::size_t h, std::size_t w, T* dx) {
  const std::size_t plane = h * w;
  std::fill_n(dx, channels * plane, T{0});
  for (std::size_t ci = 0; ci < channels; ++ci) {
    T* dst = dx + ci * plane;
    for (std::size_t ky = 0; ky < 3; ++ky) {
      for (std::size_t kx = 0; kx < 3; ++kx) {
        const T* src = col + ((ci * 3 + ky) * 3 + kx) * plane;
        for (std::size_t y = 0; y < h; ++y) {
          const std::ptrdiff_t sy = static_cast<std::ptrdiff_t>(y + ky) - 1;
          if (sy < 0 || sy >= static_cast<std::ptrdiff_t>(h)) continue;
          T* drow = dst + static_cast<std::size_t>(sy) * w;
          const T* srow = src + y * w;
          for (std::size_t xx = 0; xx < w; ++xx) {
            const std::ptrdiff_t sx = static_cast<std::ptrdiff_t>(xx + kx) - 1;
            if (sx < 0 || sx >= static_cast<std::ptrdiff_t>(w)) continue;
            drow[static_cast<std::size_t>(sx)] += srow[xx];
          }
        }
      }
    }
  }
}

}  // namespace

// ---------------------------------------------------------------- Conv2d

template <typename T>
Conv2d<T>::Conv2d(std::string name, std::size_t in_channels, std::size_t out_channels,
                  std::size_t kernel)
    : in_(in_channels),
      out_(out_channels),
      k_(kernel),
      weight_(name + ".weight", out_channels * in_channels * kernel * kernel),
      bias_(name + ".bias", out_channels) {
  if (kernel != 1 && kernel != 3) throw InvalidArgument("conv kernel must be 1 or 3");
  if (in_channels == 0 || out_channels == 0) {
    throw InvalidArgument("conv channel counts must be >= 1");
  }
  weight_.fan_in = in_channels * kernel * kernel;
  weight_.is_weight = true;
}

template <typename T>
Tensor4<T> Conv2d<T>::forward(const Tensor4<T>& x) {
  const Shape4& s = x.shape();
  if (s.c != in_) {
    throw InvalidArgument(weight_.name + ": input has " + std::to_string(s.c) +
                          " channels, expected " + std::to_string(in_));
  }
  input_shape_ = s;
  const std::size_t plane = s.plane();
  const std::size_t rows = in_ * k_ * k_;
  columns_.resize(s.n * rows * plane);
  Tensor4<T> y(Shape4{s.n, out_, s.h, s.w});
  ConstMapMatrix<T> wmat(weight_.value.data(), static_cast<Eigen::Index>(out_),
                         static_cast<Eigen::Index>(rows));
  for (std::size_t n = 0; n < s.n; ++n) {
    T* col = columns_.data() + n * rows * plane;
    if (k_ == 3) {
      im2col3(x.channel(n, 0), in_, s.h, s.w, col);
    } else {
      std::copy_n(x.channel(n, 0), rows * plane, col);
    }
    ConstMapMatrix<T> cmat(col, static_cast<Eigen::Index>(rows),
                           static_cast<Eigen::Index>(plane));
    MapMatrix<T> ymat(y.channel(n, 0), static_cast<Eigen::Index>(out_),
                      static_cast<Eigen::Index>(plane));
    ymat.noalias() = wmat * cmat;
    for (std::size_t co = 0; co < out_; ++co) {
      ymat.row(static_cast<Eigen::Index>(co)).array() += bias_.value[co];
    }
  }
  return y;
}

template <typename T>
Tensor4<T> Conv2d<T>::backward(const Tensor4<T>& grad_out) {
  const Shape4& s = input_shape_;
  if (!(grad_out.shape() == Shape4{s.n, out_, s.h, s.w})) {
    throw InvalidArgument(weight_.name + ": gradient shape mismatch");
  }
  const std::size_t plane = s.plane();
  const std::size_t rows = in_ * k_ * k_;
  Tensor4<T> dx(s);
  MapMatrix<T> dw(weight_.grad.data(), static_cast<Eigen::Index>(out_),
                  static_cast<Eigen::Index>(rows));
  ConstMapMatrix<T> wmat(weight_.value.data(), static_cast<Eigen::Index>(out_),
                         static_cast<Eigen::Index>(rows));
  RowMatrix<T> dcol(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(plane));
  for (std::size_t n = 0; n < s.n; ++n) {
    ConstMapMatrix<T> gy(grad_out.channel(n, 0), static_cast<Eigen::Index>(out_),
                         static_cast<Eigen::Index>(plane));
    ConstMapMatrix<T> cmat(columns_.data() + n * rows * plane,
                           static_cast<Eigen::Index>(rows),
                           static_cast<Eigen::Index>(plane));
    dw.noalias() += gy * cmat.transpose();
    for (std::size_t co = 0; co < out_; ++co) {
      bias_.grad[co] += gy.row(static_cast<Eigen::Index>(co)).sum();
    }
    if (k_ == 3) {
      dcol.noalias() = wmat.transpose() * gy;
      col2im3(dcol.data(), in_, s.h, s.w, dx.channel(n, 0));
    } else {
      MapMatrix<T> dxn(dx.channel(n, 0), static_cast<Eigen::Index>(rows),
                       static_cast<Eigen::Index>(plane));
      dxn.noalias() = wmat.transpose() * gy;
    }
  }
  return dx;
}

template <typename T>
void Conv2d<T>::collect(ParamSet<T>& set) {
  set.params.push_back(&weight_);
  set.params.push_back(&bias_);
}

// ---------------------------------------------------------------- BatchNorm2d

template <typename T>
BatchNorm2d<T>::BatchNorm2d(std::string name, std::size_t channels, double momentum,
                            double eps)
    : channels_(channels),
      momentum_(momentum),
      eps_(eps),
      gamma_(name + ".gamma", channels),
      beta_(name + ".beta", channels),
      running_mean_{name + ".running_mean", std::vector<T>(channels, T{0})},
      running_var_{name + ".running_var", std::vector<T>(channels, T{1})} {
  std::fill(gamma_.value.begin(), gamma_.value.end(), T{1});
}

template <typename T>
Tensor4<T> BatchNorm2d<T>::forward(const Tensor4<T>& x, Mode mode) {
  const Shape4& s = x.shape();
  if (s.c != channels_) {
    throw InvalidArgument(gamma_.name + ": input has " + std::to_string(s.c) +
                          " channels, expected " + std::to_string(channels_));
  }
  mode_ = mode;
  const std::size_t plane = s.plane();
  const double count = static_cast<double>(s.n * plane);
  normalized_ = Tensor4<T>(s);
  inv_std_.assign(channels_, T{0});
  Tensor4<T> y(s);
  if (mode == Mode::eval && !updated_) {
    static thread_local bool warned = false;
    if (!warned) {
      std::clog << "warning: batch norm evaluated before any training step; "
                   "using initial running statistics (mean 0, variance 1)\n";
      warned = true;
    }
  }
  for (std::size_t c = 0; c < channels_; ++c) {
    double mean = 0.0;
    double var = 0.0;
    if (mode == Mode::train) {
      for (std::size_t n = 0; n < s.n; ++n) {
        const T* p = x.channel(n, c);
        for (std::size_t i = 0; i < plane; ++i) mean += static_cast<double>(p[i]);
      }
      mean /= count;
      for (std::size_t n = 0; n < s.n; ++n) {
        const T* p = x.channel(n, c);
        for (std::size_t i = 0; i < plane; ++i) {
          const double d = static_cast<double>(p[i]) - mean;
          var += d * d;
        }
      }
      var /= count;
      const double unbiased = count > 1.0 ? var * count / (count - 1.0) : var;
      running_mean_.value[c] = static_cast<T>((1.0 - momentum_) * running_mean_.value[c] +
                                              momentum_ * mean);
      running_var_.value[c] = static_cast<T>((1.0 - momentum_) * running_var_.value[c] +
                                             momentum_ * unbiased);
    } else {
      mean = static_cast<double>(running_mean_.value[c]);
      var = static_cast<double>(running_var_.value[c]);
    }
    const double inv_std = 1.0 / std::sqrt(var + eps_);
    inv_std_[c] = static_cast<T>(inv_std);
    const T g = gamma_.value[c];
    const T b = beta_.value[c];
    for (std::size_t n = 0; n < s.n; ++n) {
      const T* p = x.channel(n, c);
      T* q = normalized_.channel(n, c);
      T* out = y.channel(n, c);
      for (std::size_t i = 0; i < plane; ++i) {
        q[i] = static_cast<T>((static_cast<double>(p[i]) - mean) * inv_std);
        out[i] = g * q[i] + b;
      }
    }
  }
  if (mode == Mode::train) updated_ = true;
  return y;
}

template <typename T>
Tensor4<T> BatchNorm2d<T>::backward(const Tensor4<T>& grad_out) {
  const Shape4& s = normalized_.shape();
  if (!(grad_out.shape() == s)) throw InvalidArgument(gamma_.name + ": gradient shape mismatch");
  const std::size_t plane = s.plane();
  const double count = static_cast<double>(s.n * plane);
  Tensor4<T> dx(s);
  for (std::size_t c = 0; c < channels_; ++c) {
    double sum_dy = 0.0;
    double sum_dy_xhat = 0.0;
    for (std::size_t n = 0; n < s.n; ++n) {
      const T* dy = grad_out.channel(n, c);
      const T* xh = normalized_.channel(n, c);
      for (std::size_t i = 0; i < plane; ++i) {
        sum_dy += static_cast<double>(dy[i]);
        sum_dy_xhat += static_cast<double>(dy[i]) * static_cast<double>(xh[i]);
      }
    }
    gamma_.grad[c] += static_cast<T>(sum_dy_xhat);
    beta_.grad[c] += static_cast<T>(sum_dy);
    const double g = static_cast<double>(gamma_.value[c]);
    const double inv_std = static_cast<double>(inv_std_[c]);
    for (std::size_t n = 0; n < s.n; ++n) {
      const T* dy = grad_out.channel(n, c);
      const T* xh = normalized_.channel(n, c);
      T* out = dx.channel(n, c);
      for (std::size_t i = 0; i < plane; ++i) {
        if (mode_ == Mode::train) {
          out[i] = static_cast<T>(g * inv_std / count *
                                  (count * static_cast<double>(dy[i]) - sum_dy -
                                   static_cast<double>(xh[i]) * sum_dy_xhat));
        } else {
          out[i] = static_cast<T>(g * inv_std * static_cast<double>(dy[i]));
        }
      }
    }
  }
  return dx;
}

template <typename T>
void BatchNorm2d<T>::collect(ParamSet<T>& set) {
  set.params.push_back(&gamma_);
  set.params.push_back(&beta_);
  set.buffers.push_back(&running_mean_);
  set.buffers.push_back(&running_var_);
}

// ---------------------------------------------------------------- ReLU

template <typename T>
Tensor4<T> ReLU<T>::forward(const Tensor4<T>& x) {
  shape_ = x.shape();
  active_.resize(x.size());
  Tensor4<T> y(x.shape());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const bool on = x.data()[i] > T{0};
    active_[i] = on;
    y.data()[i] = on ? x.data()[i] : T{0};
  }
  return y;
}

template <typename T>
Tensor4<T> ReLU<T>::backward(const Tensor4<T>& grad_out) const {
  if (!(grad_out.shape() == shape_)) throw InvalidArgument("relu: gradient shape mismatch");
  Tensor4<T> dx(shape_);
  for (std::size_t i = 0; i < dx.size(); ++i) {
    dx.data()[i] = active_[i] ? grad_out.data()[i] : T{0};
  }
  return dx;
}

template <typename T>
void ReLU<T>::hash_pattern(PatternHash& h) const {
  std::uint64_t word = 0;
  int bits = 0;
  for (auto a : active_) {
    word = (word << 1) | a;
    if (++bits == 64) {
      h.mix(word);
      word = 0;
      bits = 0;
    }
  }
  h.mix(word);
}

// ---------------------------------------------------------------- MaxPool2

template <typename T>
Tensor4<T> MaxPool2<T>::forward(const Tensor4<T>& x) {
  const Shape4& s = x.shape();
  if (s.h % 2 != 0 || s.w % 2 != 0) {
    throw InvalidArgument("maxpool2 requires even spatial size, got " + to_string(s) +
                          "; resize so height and width are divisible by 16");
  }
  input_shape_ = s;
  const Shape4 os{s.n, s.c, s.h / 2, s.w / 2};
  Tensor4<T> y(os);
  argmax_.assign(os.count(), 0);
  std::size_t o = 0;
  for (std::size_t n = 0; n < s.n; ++n) {
    for (std::size_t c = 0; c < s.c; ++c) {
      const std::size_t base = (n * s.c + c) * s.plane();
      for (std::size_t i = 0; i < os.h; ++i) {
        for (std::size_t j = 0; j < os.w; ++j, ++o) {
          std::size_t best = base + (2 * i) * s.w + 2 * j;
          for (std::size_t di = 0; di < 2; ++di) {
            for (std::size_t dj = 0; dj < 2; ++dj) {
              const std::size_t idx = base + (2 * i + di) * s.w + 2 * j + dj;
              if (x.data()[idx] > x.data()[best]) best = idx;
            }
          }
          argmax_[o] = static_cast<std::uint32_t>(best);
          y.data()[o] = x.data()[best];
        }
      }
    }
  }
  return y;
}

template <typename T>
Tensor4<T> MaxPool2<T>::backward(const Tensor4<T>& grad_out) const {
  if (grad_out.size() != argmax_.size()) throw InvalidArgument("maxpool2: gradient shape mismatch");
  Tensor4<T> dx(input_shape_);
  for (std::size_t o = 0; o < argmax_.size(); ++o) dx.data()[argmax_[o]] += grad_out.data()[o];
  return dx;
}

template <typename T>
void MaxPool2<T>::hash_pattern(PatternHash& h) const {
  for (auto idx : argmax_) h.mix(idx);
}

// ---------------------------------------------------------------- Upsample

namespace {

struct Tap {
  std::size_t lo;
  std::size_t hi;
  double frac;
};

// Output index o samples input coordinate (o + 0.5) / 2 - 0.5, clamped at 0.
Tap upsample_tap(std::size_t o, std::size_t n_in) {
  double src = (static_cast<double>(o) + 0.5) * 0.5 - 0.5;
  if (src < 0.0) src = 0.0;
  std::size_t lo = static_cast<std::size_t>(src);
  if (lo > n_in - 1) lo = n_in - 1;
  const std::size_t hi = std::min(lo + 1, n_in - 1);
  return Tap{lo, hi, src - static_cast<double>(lo)};
}

}  // namespace

template <typename T>
Tensor4<T> UpsampleBilinear2<T>::forward(const Tensor4<T>& x) {
  const Shape4& s = x.shape();
  input_shape_ = s;
  const Shape4 os{s.n, s.c, 2 * s.h, 2 * s.w};
  Tensor4<T> y(os);
  std::vector<Tap> rows(os.h), cols(os.w);
  for (std::size_t i = 0; i < os.h; ++i) rows[i] = upsample_tap(i, s.h);
  for (std::size_t j = 0; j < os.w; ++j) cols[j] = upsample_tap(j, s.w);
  for (std::size_t n = 0; n < s.n; ++n) {
    for (std::size_t c = 0; c < s.c; ++c) {
      const T* src = x.channel(n, c);
      T* dst = y.channel(n, c);
      for (std::size_t i = 0; i < os.h; ++i) {
        const Tap& r = rows[i];
        for (std::size_t j = 0; j < os.w; ++j) {
          const Tap& q = cols[j];
          const double top = (1.0 - q.frac) * src[r.lo * s.w + q.lo] + q.frac * src[r.lo * s.w + q.hi];
          const double bottom = (1.0 - q.frac) * src[r.hi * s.w + q.lo] + q.frac * src[r.hi * s.w + q.hi];
          dst[i * os.w + j] = static_cast<T>((1.0 - r.frac) * top + r.frac * bottom);
        }
      }
    }
  }
  return y;
}

template <typename T>
Tensor4<T> UpsampleBilinear2<T>::backward(const Tensor4<T>& grad_out) const {
  const Shape4& s = input_shape_;
  const Shape4 os{s.n, s.c, 2 * s.h, 2 * s.w};
  if (!(grad_out.shape() == os)) throw InvalidArgument("upsample: gradient shape mismatch");
  Tensor4<T> dx(s);
  std::vector<Tap> rows(os.h), cols(os.w);
  for (std::size_t i = 0; i < os.h; ++i) rows[i] = upsample_tap(i, s.h);
  for (std::size_t j = 0; j < os.w; ++j) cols[j] = upsample_tap(j, s.w);
  for (std::size_t n = 0; n < s.n; ++n) {
    for (std::size_t c = 0; c < s.c; ++c) {
      const T* g = grad_out.channel(n, c);
      T* dst = dx.channel(n, c);
      for (std::size_t i = 0; i < os.h; ++i) {
        const Tap& r = rows[i];
        for (std::size_t j = 0; j < os.w; ++j) {
          const Tap& q = cols[j];
          const double v = g[i * os.w + j];
          dst[r.lo * s.w + q.lo] += static_cast<T>((1.0 - r.frac) * (1.0 - q.frac) * v);
          dst[r.lo * s.w + q.hi] += static_cast<T>((1.0 - r.frac) * q.frac * v);
          dst[r.hi * s.w + q.lo] += static_cast<T>(r.frac * (1.0 - q.frac) * v);
          dst[r.hi * s.w + q.hi] += static_cast<T>(r.frac * q.frac * v);
        }
      }
    }
  }
  return dx;
}

// ---------------------------------------------------------------- blocks

template <typename T>
ConvBnRelu<T>::ConvBnRelu(const std::string& name, std::size_t in_channels,
                          std::size_t out_channels, double momentum, double eps)
    : conv_(name + ".conv", in_channels, out_channels, 3),
      bn_(name + ".bn", out_channels, momentum, eps) {}

template <typename T>
Tensor4<T> ConvBnRelu<T>::forward(const Tensor4<T>& x, Mode mode) {
  return relu_.forward(bn_.forward(conv_.forward(x), mode));
}

template <typename T>
Tensor4<T> ConvBnRelu<T>::backward(const Tensor4<T>& grad_out) {
  return conv_.backward(bn_.backward(relu_.backward(grad_out)));
}

template <typename T>
void ConvBnRelu<T>::collect(ParamSet<T>& set) {
  conv_.collect(set);
  bn_.collect(set);
}

template <typename T>
DoubleConv<T>::DoubleConv(const std::string& name, std::size_t in_channels,
                          std::size_t out_channels, double momentum, double eps)
    : first_(name + ".0", in_channels, out_channels, momentum, eps),
      second_(name + ".1", out_channels, out_channels, momentum, eps),
      out_(out_channels) {}

template <typename T>
Tensor4<T> DoubleConv<T>::forward(const Tensor4<T>& x, Mode mode) {
  return second_.forward(first_.forward(x, mode), mode);
}

template <typename T>
Tensor4<T> DoubleConv<T>::backward(const Tensor4<T>& grad_out) {
  return first_.backward(second_.backward(grad_out));
}

template <typename T>
void DoubleConv<T>::collect(ParamSet<T>& set) {
  first_.collect(set);
  second_.collect(set);
}

template <typename T>
void DoubleConv<T>::hash_pattern(PatternHash& h) const {
  first_.hash_pattern(h);
  second_.hash_pattern(h);
}

#define GPRD_INSTANTIATE(T)            \
  template class Conv2d<T>;            \
  template class BatchNorm2d<T>;       \
  template class ReLU<T>;              \
  template class MaxPool2<T>;          \
  template class UpsampleBilinear2<T>; \
  template class ConvBnRelu<T>;        \
  template class DoubleConv<T>;

GPRD_INSTANTIATE(float)
GPRD_INSTANTIATE(double)

#undef GPRD_INSTANTIATE

}  // namespace gprd::nn
