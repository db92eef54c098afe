#pragma once

#include <array>
#include <string>

#include "gprd/nn/layers.hpp"

namespace gprd::nn {

/// Residual dense block: three densely connected 3x3 conv + ReLU layers with
/// growth floor(c/3), a 1x1 local fusion back to c channels and a residual add.
template <typename T>
class ResidualDenseBlock {
 public:
  static constexpr std::size_t kLayers = 3;

  ResidualDenseBlock() = default;
  ResidualDenseBlock(const std::string& name, std::size_t channels);

  Tensor4<T> forward(const Tensor4<T>& f0);
  Tensor4<T> backward(const Tensor4<T>& grad_out);

  std::size_t channels() const noexcept { return c_; }
  std::size_t growth() const noexcept { return g_; }
  /// Input width of the fusion layer: c + 3g.
  std::size_t fusion_inputs() const noexcept { return c_ + kLayers * g_; }

  Conv2d<T>& layer(std::size_t l) { return convs_.at(l); }
  Conv2d<T>& fusion() noexcept { return fusion_; }
  void collect(ParamSet<T>& set);
  void hash_pattern(PatternHash& h) const;

 private:
  std::size_t c_ = 0;
  std::size_t g_ = 0;
  std::array<Conv2d<T>, kLayers> convs_;
  std::array<ReLU<T>, kLayers> relus_;
  Conv2d<T> fusion_;
};

}  // namespace gprd::nn
