#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace gprd::nn {

struct GradientCheckOptions {
  std::size_t base_width = 3;
  std::size_t height = 16;
  std::size_t width = 16;
  std::size_t batch = 1;
  std::uint64_t seed = 1;
  double step = 1e-5;
  /// Entries sampled per parameter group (all entries when the group is smaller).
  std::size_t samples_per_group = 4;
  double tolerance = 1e-4;
  /// Relative errors use max(|analytic|, |numeric|, floor) as denominator with
  /// floor = floor_fraction * (largest analytic gradient magnitude). Gradients
  /// that vanish identically (a bias feeding batch norm) then compare at the
  /// scale of the model's gradients instead of amplifying roundoff.
  double floor_fraction = 1e-4;
};

struct GroupCheck {
  std::string name;
  std::size_t checked = 0;
  std::size_t kinks = 0;  ///< entries skipped because the activation pattern changed
  double max_rel_error = 0.0;
};

struct GradientCheckReport {
  std::vector<GroupCheck> groups;  ///< every parameter group, then "input"
  double max_rel_error = 0.0;
  std::size_t checked = 0;
  std::size_t kinks = 0;
  double denominator_floor = 0.0;
  bool passed = false;

  std::string to_text() const;
};

/// Compares analytic gradients of a freshly initialized double-precision
/// network against central finite differences. The scalar objective is a
/// fixed random projection of the output, so every nonsmooth point comes from
/// ReLU or max pooling; entries whose perturbation flips an activation are
/// skipped and counted as kinks.
GradientCheckReport gradient_check(const GradientCheckOptions& options = {});

}  // namespace gprd::nn
