#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "gprd/radargram.hpp"

/// Kinematic B-scan simulator: hyperbolic target responses built from Ricker
/// wavelets plus a surface band and soil heterogeneity clutter field.
namespace gprd::sim {

inline constexpr double kSpeedOfLight = 299'792'458.0;

enum class SurfaceKind { flat, rough, grass, rough_water };
enum class Material { pec, pvc };

std::string to_string(SurfaceKind kind);
SurfaceKind parse_surface_kind(const std::string& name);
std::string to_string(Material material);
Material parse_material(const std::string& name);

struct TargetSpec {
  double x0 = 0.0;      ///< horizontal apex position [m]
  double depth = 0.1;   ///< depth below the surface [m]
  double radius = 0.02; ///< [m]
  double reflectivity = -1.0;
  double wave_speed = kSpeedOfLight / 1.7320508075688772;  ///< [m/s]
};

struct SurfaceSpec {
  SurfaceKind kind = SurfaceKind::flat;
  double roughness_amp = 0.0;  ///< peak-to-peak height fluctuation [m]
  std::uint64_t seed = 0;
  double reflection_amp = 5.0;
};

struct SoilSpec {
  double relative_permittivity = 3.0;
  double heterogeneity_level = 0.0;
  double correlation_length = 4.0;  ///< [traces]

  double wave_speed() const;
};

struct SceneSpec {
  std::vector<TargetSpec> targets;
  SurfaceSpec surface;
  SoilSpec soil;
  std::size_t height = kWorkingHeight;
  std::size_t width = kWorkingWidth;
  double time_window = 8e-9;          ///< recorded span [s]
  double time_zero = 1.2e-9;          ///< recording lead before the surface echo [s]
  double wavelet_center_freq = 1.5e9; ///< [Hz]
  double trace_spacing = 0.01;        ///< [m]
  std::uint64_t seed = 0;

  /// Throws InvalidArgument for any violated invariant.
  void validate() const;

  double sample_interval() const { return time_window / static_cast<double>(height); }
  double trace_position(std::size_t col) const {
    return static_cast<double>(col) * trace_spacing;
  }
  /// Fractional row of a two-way time measured from the surface.
  double row_of_time(double t) const { return (t + time_zero) / sample_interval(); }
};

/// Ricker wavelet with unit peak at tau = 0.
double ricker(double tau, double center_freq);

/// Two-way travel time from trace position x to the target apex geometry.
double two_way_time(const TargetSpec& target, double x);

/// Reflection coefficient of a target material embedded in soil.
double material_reflectivity(Material material, double soil_permittivity);

Radargram synth_target_response(const SceneSpec& scene);
Radargram synth_clutter(const SceneSpec& scene);

/// Surface height profile per trace in meters (zero for flat surfaces).
std::vector<double> surface_heights(const SceneSpec& scene);

/// raw = clutter + targets, clutter_free = targets (not yet normalized).
DatasetPair synth_pair(const SceneSpec& scene);

/// Normalizes both sides of a pair after resizing to height x width.
DatasetPair prepare_pair(const DatasetPair& pair, std::size_t height,
                         std::size_t width);

/// Mixes a clutter-only scan with a clutter-free scan:
///   raw = normalize(mix * normalize(clutter) + normalize(clean)).
/// With working_size set both inputs are first resized to it.
DatasetPair hybridize(const Radargram& clutter_only, const Radargram& clutter_free,
                      double mix,
                      std::optional<std::pair<std::size_t, std::size_t>> working_size =
                          std::nullopt);

struct SoilKind {
  std::string name;
  double permittivity_min;
  double permittivity_max;
  double heterogeneity_level;
  double correlation_length;
};

/// Dry/damp sand, dry/wet clay, dry loam and a heterogeneous mixture.
const std::vector<SoilKind>& soil_catalog();
const SoilKind& find_soil(const std::string& name);

struct DatasetConfig {
  std::size_t count = 10;
  std::uint64_t seed = 0;
  std::size_t height = kWorkingHeight;  ///< prepared (working) size
  std::size_t width = kWorkingWidth;
  std::size_t render_height = kWorkingHeight;  ///< simulated scene size
  std::size_t render_width = kWorkingWidth;
  std::vector<SurfaceKind> surfaces{SurfaceKind::flat, SurfaceKind::rough,
                                    SurfaceKind::grass, SurfaceKind::rough_water};
  std::vector<std::string> soils{"dry_sand",  "damp_sand", "dry_clay",
                                 "wet_clay",  "dry_loam",  "heterogeneous"};
  std::vector<Material> materials{Material::pec, Material::pvc};
  int min_targets = 1;
  int max_targets = 3;
  double min_depth = 0.03;
  double max_depth = 0.25;
  double min_radius = 0.01;
  double max_radius = 0.05;
  double roughness_amp = 0.04;
  double surface_reflection_amp = 5.0;
  double time_window = 8e-9;
  double time_zero = 1.2e-9;
  double wavelet_center_freq = 1.5e9;
  double trace_spacing = 0.01;
  /// 1-based crop starts applied to each rendered scan (empty = no crops).
  std::vector<std::size_t> crop_starts;
  std::size_t crop_width = kWorkingWidth;
  bool normalize = true;

  void validate() const;
};

/// Draws scene specs; scene i depends only on (seed, i).
std::vector<SceneSpec> draw_scenes(const DatasetConfig& config);

/// Renders, crops (if configured) and prepares every scene. Output order is
/// scene order, then crop order.
Dataset render_dataset(const std::vector<SceneSpec>& scenes,
                       const DatasetConfig& config, std::size_t threads = 1);

Dataset generate_dataset(const DatasetConfig& config, std::size_t threads = 1);

/// Per-scene seed derived from the dataset seed and the scene index.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

}  // namespace gprd::sim
