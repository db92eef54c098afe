#pragma once

#include <cstddef>
#include <span>
#include <string>

#include "gprd/metrics.hpp"
#include "gprd/radargram.hpp"

namespace gprd::metrics {

/// Training objective. `combined` is MAE + (1 - MS-SSIM); the others exist for
/// loss ablations.
enum class LossKind { combined, mae, mse, msssim };

std::string to_string(LossKind kind);
LossKind parse_loss_kind(const std::string& name);

struct LossValue {
  double total = 0.0;
  double mae = 0.0;      ///< always reported
  double mse = 0.0;      ///< always reported
  double ms_ssim = 1.0;  ///< evaluated only when the loss uses it
};

/// Loss of prediction y against gt (row-major height x width). When grad_y is
/// non-empty it receives dLoss/dy. The MAE subgradient at y == gt is zero.
LossValue evaluate_loss(LossKind kind, std::span<const double> y,
                        std::span<const double> gt, std::size_t height,
                        std::size_t width, const ResolvedMsSsim& cfg,
                        std::span<double> grad_y = {});

double combined_loss(const Radargram& y, const Radargram& gt,
                     const MsSsimConfig& cfg = {});

}  // namespace gprd::metrics
