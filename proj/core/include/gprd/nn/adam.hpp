#pragma once

#include <cstddef>
#include <vector>

#include "gprd/nn/layers.hpp"

namespace gprd::nn {

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// Adam with bias correction. Moment estimates are kept in double precision,
/// one slot per parameter group in collection order.
template <typename T>
class Adam {
 public:
  explicit Adam(AdamConfig cfg = {}) : cfg_(cfg) {}

  /// Applies one update using the accumulated gradients of `set`.
  void step(const ParamSet<T>& set, double lr);
  std::size_t steps() const noexcept { return t_; }
  const AdamConfig& config() const noexcept { return cfg_; }

 private:
  AdamConfig cfg_;
  std::size_t t_ = 0;
  std::vector<std::vector<double>> m_;
  std::vector<std::vector<double>> v_;
};

/// Step schedule lr0 * factor^floor(epoch / every).
double lr_at_epoch(std::size_t epoch, double lr0 = 1e-4, std::size_t every = 30,
                   double factor = 0.1);

}  // namespace gprd::nn
