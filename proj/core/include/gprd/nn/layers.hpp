#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "gprd/nn/tensor.hpp"

namespace gprd::nn {

enum class Mode { train, eval };

/// A trainable parameter group with its accumulated gradient.
template <typename T>
struct Param {
  std::string name;
  std::vector<T> value;
  std::vector<T> grad;

  Param() = default;
  Param(std::string param_name, std::size_t count)
      : name(std::move(param_name)), value(count, T{0}), grad(count, T{0}) {}
  std::size_t fan_in = 1;  ///< inputs feeding one output (weights only)
  bool is_weight = false;
};

/// Non-trainable persistent state (batch-norm running statistics).
template <typename T>
struct Buffer {
  std::string name;
  std::vector<T> value;
};

template <typename T>
struct ParamSet {
  std::vector<Param<T>*> params;
  std::vector<Buffer<T>*> buffers;
};

/// FNV-1a accumulator over activation patterns (ReLU masks, pooling argmax).
/// Two forward passes with equal hashes ran through the same linear pieces.
struct PatternHash {
  std::uint64_t value = 1469598103934665603ull;
  void mix(std::uint64_t v) {
    for (int b = 0; b < 8; ++b) {
      value ^= (v >> (8 * b)) & 0xFFu;
      value *= 1099511628211ull;
    }
  }
};

/// Stride-1 "same" convolution (cross-correlation) with a 1x1 or 3x3 kernel.
template <typename T>
class Conv2d {
 public:
  Conv2d() = default;
  Conv2d(std::string name, std::size_t in_channels, std::size_t out_channels,
         std::size_t kernel);

  Tensor4<T> forward(const Tensor4<T>& x);
  /// Accumulates weight/bias gradients and returns dL/dx.
  Tensor4<T> backward(const Tensor4<T>& grad_out);

  std::size_t in_channels() const noexcept { return in_; }
  std::size_t out_channels() const noexcept { return out_; }
  std::size_t kernel() const noexcept { return k_; }
  Param<T>& weight() noexcept { return weight_; }
  Param<T>& bias() noexcept { return bias_; }
  const Param<T>& weight() const noexcept { return weight_; }
  const Param<T>& bias() const noexcept { return bias_; }
  void collect(ParamSet<T>& set);

 private:
  std::size_t in_ = 0;
  std::size_t out_ = 0;
  std::size_t k_ = 1;
  Param<T> weight_;  ///< [out][in][k][k]
  Param<T> bias_;    ///< [out]
  Shape4 input_shape_{};
  std::vector<T> columns_;  ///< cached im2col (or the input for 1x1)
};

/// Per-channel batch normalization with affine parameters.
template <typename T>
class BatchNorm2d {
 public:
  BatchNorm2d() = default;
  BatchNorm2d(std::string name, std::size_t channels, double momentum = 0.1,
              double eps = 1e-5);

  Tensor4<T> forward(const Tensor4<T>& x, Mode mode);
  Tensor4<T> backward(const Tensor4<T>& grad_out);

  Param<T>& gamma() noexcept { return gamma_; }
  Param<T>& beta() noexcept { return beta_; }
  Buffer<T>& running_mean() noexcept { return running_mean_; }
  Buffer<T>& running_var() noexcept { return running_var_; }
  /// False until the first training-mode forward pass.
  bool has_running_stats() const noexcept { return updated_; }
  /// Declares the running statistics valid (e.g. after loading a checkpoint).
  void mark_running_stats() noexcept { updated_ = true; }
  void collect(ParamSet<T>& set);

 private:
  std::size_t channels_ = 0;
  double momentum_ = 0.1;
  double eps_ = 1e-5;
  Param<T> gamma_;
  Param<T> beta_;
  Buffer<T> running_mean_;
  Buffer<T> running_var_;
  bool updated_ = false;
  Mode mode_ = Mode::train;
  Tensor4<T> normalized_;
  std::vector<T> inv_std_;
};

template <typename T>
class ReLU {
 public:
  Tensor4<T> forward(const Tensor4<T>& x);
  Tensor4<T> backward(const Tensor4<T>& grad_out) const;
  void hash_pattern(PatternHash& h) const;

 private:
  std::vector<std::uint8_t> active_;
  Shape4 shape_{};
};

/// 2x2 max pooling, stride 2. Odd spatial sizes are rejected.
template <typename T>
class MaxPool2 {
 public:
  Tensor4<T> forward(const Tensor4<T>& x);
  Tensor4<T> backward(const Tensor4<T>& grad_out) const;
  const std::vector<std::uint32_t>& argmax() const noexcept { return argmax_; }
  void hash_pattern(PatternHash& h) const;

 private:
  Shape4 input_shape_{};
  std::vector<std::uint32_t> argmax_;  ///< flat input index per output element
};

/// x2 bilinear upsampling with half-pixel centers and clamped borders.
template <typename T>
class UpsampleBilinear2 {
 public:
  Tensor4<T> forward(const Tensor4<T>& x);
  Tensor4<T> backward(const Tensor4<T>& grad_out) const;

 private:
  Shape4 input_shape_{};
};

/// 3x3 convolution, batch normalization, ReLU.
template <typename T>
class ConvBnRelu {
 public:
  ConvBnRelu() = default;
  ConvBnRelu(const std::string& name, std::size_t in_channels,
             std::size_t out_channels, double momentum, double eps);

  Tensor4<T> forward(const Tensor4<T>& x, Mode mode);
  Tensor4<T> backward(const Tensor4<T>& grad_out);
  void collect(ParamSet<T>& set);
  void hash_pattern(PatternHash& h) const { relu_.hash_pattern(h); }
  void mark_running_stats() noexcept { bn_.mark_running_stats(); }
  Conv2d<T>& conv() noexcept { return conv_; }
  BatchNorm2d<T>& bn() noexcept { return bn_; }

 private:
  Conv2d<T> conv_;
  BatchNorm2d<T> bn_;
  ReLU<T> relu_;
};

/// Two ConvBnRelu stages.
template <typename T>
class DoubleConv {
 public:
  DoubleConv() = default;
  DoubleConv(const std::string& name, std::size_t in_channels,
             std::size_t out_channels, double momentum, double eps);

  Tensor4<T> forward(const Tensor4<T>& x, Mode mode);
  Tensor4<T> backward(const Tensor4<T>& grad_out);
  void collect(ParamSet<T>& set);
  void hash_pattern(PatternHash& h) const;
  std::size_t out_channels() const noexcept { return out_; }
  void mark_running_stats() noexcept {
    first_.mark_running_stats();
    second_.mark_running_stats();
  }

 private:
  ConvBnRelu<T> first_;
  ConvBnRelu<T> second_;
  std::size_t out_ = 0;
};

}  // namespace gprd::nn
