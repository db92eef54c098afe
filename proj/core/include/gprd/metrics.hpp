#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "gprd/radargram.hpp"

namespace gprd::metrics {

/// Sentinel for PSNR / SCR / improvement factor when the denominator vanishes.
inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Calibrated per-scale exponents for five scales (coarsest last).
inline constexpr double kReferenceScaleWeights[5] = {0.0448, 0.2856, 0.3001,
                                                     0.2363, 0.1333};

enum class MomentMode {
  windowed,  ///< local statistics under a sliding Gaussian window
  global,    ///< one set of whole-image moments per scale
};

struct MsSsimConfig {
  /// Number of scales; 0 picks 5 when both dims >= 176, else 3, then caps it
  /// so the window fits the coarsest scale.
  int scales = 0;
  int window_size = 11;
  double window_sigma = 1.5;
  /// Lets automatic configuration fall back to a 7-tap window for small scans.
  bool allow_small_window = true;
  double k1 = 0.01;
  double k2 = 0.03;
  double dynamic_range = 1.0;
  MomentMode moments = MomentMode::windowed;
  /// Per-scale exponents (alpha_M = beta_k = gamma_k = w_k). Empty selects the
  /// reference weights. Renormalized to sum to one over the active scales.
  std::vector<double> weights;
};

/// A configuration with every automatic choice made for a given image size.
struct ResolvedMsSsim {
  int scales;
  int window_size;
  double window_sigma;
  double c1;
  double c2;
  MomentMode moments;
  std::vector<double> weights;  ///< size == scales, sums to 1
};

/// Throws InvalidArgument when the window does not fit the coarsest scale; the
/// message names the largest admissible number of scales.
ResolvedMsSsim resolve(const MsSsimConfig& cfg, std::size_t height,
                       std::size_t width);

/// Largest M such that the coarsest of M scales still holds the window.
int max_scales(std::size_t height, std::size_t width, int window_size);

/// MS-SSIM of y against gt (row-major height x width). When grad_y is
/// non-empty it receives d(MS-SSIM)/dy.
double ms_ssim(std::span<const double> y, std::span<const double> gt,
               std::size_t height, std::size_t width, const ResolvedMsSsim& cfg,
               std::span<double> grad_y = {});

double ms_ssim(const Radargram& y, const Radargram& gt,
               const MsSsimConfig& cfg = {});

double mae(const Radargram& y, const Radargram& gt);
double mse(const Radargram& y, const Radargram& gt);
/// 10 log10(1 / MSE); +infinity when MSE = 0.
double psnr(const Radargram& y, const Radargram& gt);
double psnr_from_mse(double mse_value);

struct TargetMask {
  std::size_t height = 0;
  std::size_t width = 0;
  std::vector<bool> mask;  ///< true = target region

  bool operator()(std::size_t row, std::size_t col) const {
    return mask[row * width + col];
  }
  std::size_t count() const;
};

/// Target region where |gt| >= frac * max|gt|. Throws InvalidArgument when gt
/// is identically zero.
TargetMask mask_from_ground_truth(const Radargram& gt, double frac = 0.1);

/// Rectangle [row0, row1) x [col0, col1) marked as target.
TargetMask mask_from_rectangle(std::size_t height, std::size_t width,
                               std::size_t row0, std::size_t row1,
                               std::size_t col0, std::size_t col1);

/// max|r| over the target region divided by max|r| over its complement;
/// +infinity when the clutter maximum is zero.
double scr(const Radargram& r, const TargetMask& mask);

/// 20 log10(SCR_processed / SCR_raw) in dB; +infinity when SCR_processed is
/// infinite, -infinity when SCR_raw is.
double improvement_factor(const Radargram& raw, const Radargram& processed,
                          const TargetMask& mask);
double improvement_factor_from_scr(double scr_raw, double scr_processed);

/// Subtracts the median amplitude so a flat background sits at zero.
Radargram median_centered(const Radargram& r);

}  // namespace gprd::metrics
