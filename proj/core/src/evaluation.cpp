#include "gprd/evaluation.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>

namespace gprd::metrics {

namespace {

std::string format_value(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 10);
  return std::string(buf, end);
}

void append_row(std::string& out, const ScanMetrics& m) {
  out += m.scan;
  out += ',';
  out += m.method;
  for (double v : {m.mae, m.mse, m.psnr, m.ms_ssim, m.scr_raw, m.scr_processed,
                   m.improvement_db}) {
    out += ',';
    out += format_value(v);
  }
  out += '\n';
}

}  // namespace

ScanMetrics evaluate_scan(const Radargram& raw, const Radargram& processed,
                          const Radargram& ground_truth, const EvalOptions& options) {
  ScanMetrics m;
  const Radargram y = normalize_unit(processed);
  const Radargram gt = normalize_unit(ground_truth);
  m.mae = mae(y, gt);
  m.mse = mse(y, gt);
  m.psnr = psnr_from_mse(m.mse);
  m.ms_ssim = ms_ssim(y, gt, options.ms_ssim);

  const Radargram centered_gt = median_centered(gt);
  if (!options.mask &&
      std::all_of(centered_gt.data().begin(), centered_gt.data().end(),
                  [](double v) { return v == 0.0; })) {
    // Target-free scene: no region to measure contrast against.
    m.scr_raw = m.scr_processed = m.improvement_db = std::nan("");
    return m;
  }
  const TargetMask mask =
      options.mask ? *options.mask : mask_from_ground_truth(centered_gt, options.mask_frac);
  m.scr_raw = scr(median_centered(raw), mask);
  m.scr_processed = scr(median_centered(processed), mask);
  m.improvement_db = improvement_factor_from_scr(m.scr_raw, m.scr_processed);
  return m;
}

std::vector<ScanMetrics> EvalReport::aggregates() const {
  // Column means per method; NaN entries (undefined for that scan) are skipped.
  struct Acc {
    double sum[7] = {};
    std::size_t n[7] = {};
  };
  std::map<std::string, Acc> sums;
  for (const auto& r : rows) {
    auto& acc = sums[r.method];
    const double v[7] = {r.mae,     r.mse,           r.psnr,          r.ms_ssim,
                         r.scr_raw, r.scr_processed, r.improvement_db};
    for (int c = 0; c < 7; ++c) {
      if (std::isnan(v[c])) continue;
      acc.sum[c] += v[c];
      ++acc.n[c];
    }
  }
  std::vector<ScanMetrics> out;
  for (const auto& [method, acc] : sums) {
    double mean[7];
    for (int c = 0; c < 7; ++c) {
      mean[c] = acc.n[c] ? acc.sum[c] / static_cast<double>(acc.n[c]) : std::nan("");
    }
    ScanMetrics m;
    m.scan = "MEAN";
    m.method = method;
    m.mae = mean[0];
    m.mse = mean[1];
    m.psnr = mean[2];
    m.ms_ssim = mean[3];
    m.scr_raw = mean[4];
    m.scr_processed = mean[5];
    m.improvement_db = mean[6];
    out.push_back(m);
  }
  return out;
}

std::string EvalReport::to_csv() const {
  std::string out = kReportHeader;
  out += '\n';
  for (const auto& r : rows) append_row(out, r);
  for (const auto& a : aggregates()) append_row(out, a);
  return out;
}

}  // namespace gprd::metrics
