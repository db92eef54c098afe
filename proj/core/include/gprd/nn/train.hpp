#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "gprd/loss.hpp"
#include "gprd/nn/adam.hpp"
#include "gprd/nn/crnet.hpp"
#include "gprd/radargram.hpp"

namespace gprd::nn {

struct TrainConfig {
  std::size_t batch_size = 40;
  std::size_t epochs = 100;
  double lr0 = 1e-4;
  std::size_t decay_every = 30;  ///< epochs
  double decay_factor = 0.1;
  AdamConfig adam;
  std::uint64_t seed = 0;
  metrics::LossKind loss = metrics::LossKind::combined;
  metrics::MsSsimConfig ms_ssim;
  /// Stops after this many optimizer steps, possibly mid-epoch.
  std::optional<std::size_t> max_steps;
  bool shuffle = true;

  void validate() const;
};

struct EpochRecord {
  std::size_t epoch = 0;
  double lr = 0.0;
  std::size_t steps = 0;
  double loss = 0.0;  ///< sample-weighted mean over the epoch
  double mae = 0.0;
  double ms_ssim = 0.0;
};

struct TrainHistory {
  std::vector<EpochRecord> epochs;
  std::vector<double> step_losses;  ///< batch-mean loss before each update

  /// Tab-free comma-separated text: epoch,lr,steps,loss,mae,ms_ssim.
  std::string to_csv() const;
};

/// Thrown when a batch produces a NaN or infinite loss.
class TrainingDiverged : public std::runtime_error {
 public:
  TrainingDiverged(std::size_t epoch, std::size_t batch, metrics::LossValue parts);
  std::size_t epoch() const noexcept { return epoch_; }
  std::size_t batch() const noexcept { return batch_; }
  const metrics::LossValue& parts() const noexcept { return parts_; }

 private:
  std::size_t epoch_;
  std::size_t batch_;
  metrics::LossValue parts_;
};

/// Mini-batch training of `model` on raw -> clutter-free pairs. Pairs must
/// share one shape with both dimensions divisible by 16. The model is trained
/// in place from its current weights; initialize it beforehand.
TrainHistory train(CRNet<float>& model, const Dataset& data, const TrainConfig& cfg,
                   const std::function<void(const EpochRecord&)>& on_epoch = {});

/// Packs scans into an (N, 1, H, W) tensor.
template <typename T>
Tensor4<T> to_tensor(const std::vector<const Radargram*>& scans);

}  // namespace gprd::nn
