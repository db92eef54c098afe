#include "gprd/loss.hpp"

#include <cmath>
#include <vector>

#include "gprd/errors.hpp"

namespace gprd::metrics {

std::string to_string(LossKind kind) {
  switch (kind) {
    case LossKind::combined:
      return "combined";
    case LossKind::mae:
      return "mae";
    case LossKind::mse:
      return "mse";
    case LossKind::msssim:
      return "msssim";
  }
  return "combined";
}

LossKind parse_loss_kind(const std::string& name) {
  if (name == "combined") return LossKind::combined;
  if (name == "mae") return LossKind::mae;
  if (name == "mse") return LossKind::mse;
  if (name == "msssim") return LossKind::msssim;
  throw InvalidArgument("unknown loss '" + name + "' (expected combined|mae|mse|msssim)");
}

LossValue evaluate_loss(LossKind kind, std::span<const double> y,
                        std::span<const double> gt, std::size_t height,
                        std::size_t width, const ResolvedMsSsim& cfg,
                        std::span<double> grad_y) {
  const std::size_t n = height * width;
  if (y.size() != n || gt.size() != n) {
    throw InvalidArgument("loss: buffer sizes do not match " + std::to_string(height) +
                          "x" + std::to_string(width));
  }
  const bool want_grad = !grad_y.empty();
  if (want_grad && grad_y.size() != n) {
    throw InvalidArgument("loss: gradient buffer size mismatch");
  }

  LossValue out;
  const double inv_n = 1.0 / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double d = y[i] - gt[i];
    out.mae += std::abs(d);
    out.mse += d * d;
  }
  out.mae *= inv_n;
  out.mse *= inv_n;

  const bool uses_ssim = kind == LossKind::combined || kind == LossKind::msssim;
  std::vector<double> ssim_grad;
  if (uses_ssim) {
    if (want_grad) ssim_grad.assign(n, 0.0);
    out.ms_ssim = ms_ssim(y, gt, height, width, cfg, ssim_grad);
  }

  switch (kind) {
    case LossKind::combined:
      out.total = out.mae + (1.0 - out.ms_ssim);
      break;
    case LossKind::mae:
      out.total = out.mae;
      break;
    case LossKind::mse:
      out.total = out.mse;
      break;
    case LossKind::msssim:
      out.total = 1.0 - out.ms_ssim;
      break;
  }

  if (want_grad) {
    for (std::size_t i = 0; i < n; ++i) {
      const double d = y[i] - gt[i];
      double g = 0.0;
      if (kind == LossKind::combined || kind == LossKind::mae) {
        g += d > 0.0 ? inv_n : (d < 0.0 ? -inv_n : 0.0);
      }
      if (kind == LossKind::mse) g += 2.0 * d * inv_n;
      if (uses_ssim) g -= ssim_grad[i];
      grad_y[i] = g;
    }
  }
  return out;
}

double combined_loss(const Radargram& y, const Radargram& gt, const MsSsimConfig& cfg) {
  if (!y.same_shape(gt)) throw InvalidArgument("combined_loss: shape mismatch");
  const auto resolved = resolve(cfg, y.height(), y.width());
  return evaluate_loss(LossKind::combined, y.data(), gt.data(), y.height(), y.width(),
                       resolved)
      .total;
}

}  // namespace gprd::metrics
