#include "gprd/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "gprd/errors.hpp"

namespace gprd::metrics {

namespace {

void require_same_shape(const Radargram& a, const Radargram& b, const char* op) {
  if (!a.same_shape(b)) {
    throw InvalidArgument(std::string(op) + ": shape mismatch " +
                          std::to_string(a.height()) + "x" + std::to_string(a.width()) +
                          " vs " + std::to_string(b.height()) + "x" +
                          std::to_string(b.width()));
  }
}

}  // namespace

double mae(const Radargram& y, const Radargram& gt) {
  require_same_shape(y, gt, "mae");
  double acc = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) acc += std::abs(y.data()[i] - gt.data()[i]);
  return acc / static_cast<double>(y.size());
}

double mse(const Radargram& y, const Radargram& gt) {
  require_same_shape(y, gt, "mse");
  double acc = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double d = y.data()[i] - gt.data()[i];
    acc += d * d;
  }
  return acc / static_cast<double>(y.size());
}

double psnr_from_mse(double mse_value) {
  if (mse_value <= 0.0) return kInfinity;
  return 10.0 * std::log10(1.0 / mse_value);
}

double psnr(const Radargram& y, const Radargram& gt) {
  return psnr_from_mse(mse(y, gt));
}

std::size_t TargetMask::count() const {
  return static_cast<std::size_t>(std::count(mask.begin(), mask.end(), true));
}

TargetMask mask_from_ground_truth(const Radargram& gt, double frac) {
  if (!(frac > 0.0 && frac <= 1.0)) {
    throw InvalidArgument("mask fraction must lie in (0, 1]");
  }
  double peak = 0.0;
  for (double v : gt.data()) peak = std::max(peak, std::abs(v));
  if (peak == 0.0) {
    throw InvalidArgument("ground truth is all zeros: no target region");
  }
  TargetMask out{gt.height(), gt.width(), std::vector<bool>(gt.size())};
  const double threshold = frac * peak;
  for (std::size_t i = 0; i < gt.size(); ++i) {
    out.mask[i] = std::abs(gt.data()[i]) >= threshold;
  }
  return out;
}

TargetMask mask_from_rectangle(std::size_t height, std::size_t width,
                               std::size_t row0, std::size_t row1,
                               std::size_t col0, std::size_t col1) {
  if (row0 >= row1 || col0 >= col1 || row1 > height || col1 > width) {
    throw InvalidArgument("target rectangle outside the scan");
  }
  TargetMask out{height, width, std::vector<bool>(height * width, false)};
  for (std::size_t i = row0; i < row1; ++i) {
    for (std::size_t j = col0; j < col1; ++j) out.mask[i * width + j] = true;
  }
  return out;
}

double scr(const Radargram& r, const TargetMask& mask) {
  if (mask.height != r.height() || mask.width != r.width() ||
      mask.mask.size() != r.size()) {
    throw InvalidArgument("scr: mask shape does not match the scan");
  }
  const std::size_t inside = mask.count();
  if (inside == 0 || inside == r.size()) {
    throw InvalidArgument("scr: mask needs both target and clutter pixels");
  }
  double signal = 0.0;
  double clutter = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    const double a = std::abs(r.data()[i]);
    if (mask.mask[i]) {
      signal = std::max(signal, a);
    } else {
      clutter = std::max(clutter, a);
    }
  }
  if (clutter == 0.0) return kInfinity;
  return signal / clutter;
}

double improvement_factor_from_scr(double scr_raw, double scr_processed) {
  if (std::isinf(scr_processed) && std::isinf(scr_raw)) return 0.0;
  if (std::isinf(scr_processed)) return kInfinity;
  if (std::isinf(scr_raw)) return -kInfinity;
  if (scr_raw == 0.0 && scr_processed == 0.0) return 0.0;
  if (scr_raw == 0.0) return kInfinity;
  if (scr_processed == 0.0) return -kInfinity;
  return 20.0 * std::log10(scr_processed / scr_raw);
}

double improvement_factor(const Radargram& raw, const Radargram& processed,
                          const TargetMask& mask) {
  return improvement_factor_from_scr(scr(raw, mask), scr(processed, mask));
}

Radargram median_centered(const Radargram& r) {
  std::vector<double> sorted(r.data().begin(), r.data().end());
  const std::size_t mid = sorted.size() / 2;
  std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(mid),
                   sorted.end());
  double median = sorted[mid];
  if (sorted.size() % 2 == 0) {
    const double lower = *std::max_element(
        sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(mid));
    median = 0.5 * (median + lower);
  }
  std::vector<double> out(r.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = r.data()[i] - median;
  return r.with_data(std::move(out));
}

}  // namespace gprd::metrics
