#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gprd/metrics.hpp"
#include "gprd/radargram.hpp"

namespace gprd::metrics {

struct ScanMetrics {
  std::string scan;
  std::string method;
  double mae = 0.0;
  double mse = 0.0;
  double psnr = 0.0;
  double ms_ssim = 0.0;
  double scr_raw = 0.0;
  double scr_processed = 0.0;
  double improvement_db = 0.0;
};

struct EvalOptions {
  MsSsimConfig ms_ssim;
  double mask_frac = 0.1;
  /// Overrides the ground-truth-derived target region when set.
  std::optional<TargetMask> mask;
};

/// Full-reference metrics compare normalize_unit(processed) with the
/// normalized ground truth. Field metrics use median-centered amplitudes and a
/// target mask thresholded from the median-centered ground truth; they are NaN
/// when that ground truth has no target region and no mask is given.
ScanMetrics evaluate_scan(const Radargram& raw, const Radargram& processed,
                          const Radargram& ground_truth, const EvalOptions& options = {});

struct EvalReport {
  std::vector<ScanMetrics> rows;

  /// Column means per method, ordered by method name. NaN entries are
  /// left out of their column's mean.
  std::vector<ScanMetrics> aggregates() const;
  /// Comma-separated: one row per scan per method, then one MEAN row per
  /// method.
  std::string to_csv() const;
};

inline constexpr const char* kReportHeader =
    "scan,method,MAE,MSE,PSNR,MS_SSIM,SCR_raw,SCR_proc,Im_dB";

}  // namespace gprd::metrics
