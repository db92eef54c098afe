#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "gprd/nn/layers.hpp"
#include "gprd/nn/rdb.hpp"

namespace gprd::nn {

struct CRNetConfig {
  std::size_t base_width = 64;
  std::size_t depth = 4;       ///< fixed
  std::size_t rdb_layers = 3;  ///< fixed
  double bn_momentum = 0.1;
  double bn_eps = 1e-5;

  /// Throws InvalidArgument unless base_width >= 3, depth == 4, rdb_layers == 3.
  void validate() const;
  /// Channels of encoder level i (0-based): b * 2^i.
  std::size_t level_channels(std::size_t level) const { return base_width << level; }
  std::size_t bottleneck_channels() const { return base_width << depth; }
};

enum class InitKind {
  scaled_gaussian,  ///< N(0, 1/fan_in) weights, zero biases
  unit_gaussian,   ///< N(0, 1) weights, zero biases
};

std::string to_string(InitKind kind);
InitKind parse_init_kind(const std::string& name);

/// Encoder-decoder with residual dense blocks on every skip connection.
template <typename T>
class CRNet {
 public:
  static constexpr std::size_t kLevels = 4;

  explicit CRNet(const CRNetConfig& cfg = {});

  const CRNetConfig& config() const noexcept { return cfg_; }

  /// x must be (N, 1, H, W) with H and W divisible by 16.
  Tensor4<T> forward(const Tensor4<T>& x, Mode mode);
  /// Back-propagates dL/dy through the last forward pass, accumulating
  /// parameter gradients. Returns dL/dx.
  Tensor4<T> backward(const Tensor4<T>& grad_out);

  /// Pointers into this model, in a fixed order. Invalidated by moving/copying.
  ParamSet<T> parameters();
  void zero_grad();
  void initialize(std::uint64_t seed, InitKind kind = InitKind::scaled_gaussian);
  std::size_t parameter_count();

  /// Marks every batch-norm running statistic as valid.
  void mark_running_stats();

  /// Activation pattern of the last forward pass.
  PatternHash pattern() const;

  ResidualDenseBlock<T>& rdb(std::size_t level) { return rdbs_.at(level); }

 private:
  CRNetConfig cfg_;
  std::array<DoubleConv<T>, kLevels> encoders_;
  std::array<MaxPool2<T>, kLevels> pools_;
  DoubleConv<T> bottleneck_;
  std::array<ResidualDenseBlock<T>, kLevels> rdbs_;
  std::array<UpsampleBilinear2<T>, kLevels> ups_;
  std::array<DoubleConv<T>, kLevels> decoders_;
  ConvBnRelu<T> head0_;
  ConvBnRelu<T> head1_;
  Conv2d<T> out_;
};

/// Throws InvalidArgument unless x is (N, 1, H, W) with H, W divisible by 16.
void check_input_shape(const Shape4& s);

/// Copies values and buffers between models of equal configuration.
template <typename To, typename From>
void copy_weights(CRNet<To>& dst, CRNet<From>& src) {
  ParamSet<To> d = dst.parameters();
  ParamSet<From> s = src.parameters();
  for (std::size_t i = 0; i < d.params.size(); ++i) {
    auto& dv = d.params[i]->value;
    const auto& sv = s.params[i]->value;
    for (std::size_t j = 0; j < dv.size(); ++j) dv[j] = static_cast<To>(sv[j]);
  }
  for (std::size_t i = 0; i < d.buffers.size(); ++i) {
    auto& dv = d.buffers[i]->value;
    const auto& sv = s.buffers[i]->value;
    for (std::size_t j = 0; j < dv.size(); ++j) dv[j] = static_cast<To>(sv[j]);
  }
}

}  // namespace gprd::nn
