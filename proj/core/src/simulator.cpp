#include "gprd/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "gprd/errors.hpp"
#include "gprd/parallel.hpp"
#include "gprd/random.hpp"

namespace gprd::sim {

namespace {

constexpr double kPi = std::numbers::pi;

// Crosstalk arrives this long before the surface echo [s].
constexpr double kCrosstalkLead = 0.7e-9;
constexpr double kCrosstalkGain = 0.6;
// Peak relative amplitude modulation of the surface echo for rough surfaces.
constexpr double kRoughAmplitudeSwing = 0.2;
constexpr double kPuddleGain = 1.5;
// Width of the smooth onset of heterogeneity clutter below the surface [s].
constexpr double kHeterogeneityOnset = 0.15e-9;

double surface_correlation(SurfaceKind kind) {
  switch (kind) {
    case SurfaceKind::grass:
      return 1.5;
    case SurfaceKind::rough:
    case SurfaceKind::rough_water:
      return 6.0;
    case SurfaceKind::flat:
      break;
  }
  return 0.0;
}

/// Damped cosine used for the direct-wave and surface echoes.
double damped_wavelet(double tau, double center_freq) {
  const double decay = 0.6 / center_freq;
  return std::exp(-(tau / decay) * (tau / decay)) *
         std::cos(2.0 * kPi * center_freq * tau);
}

/// Gaussian smoothing with clamped edges; sigma in samples.
std::vector<double> gaussian_smooth(const std::vector<double>& in, double sigma) {
  if (sigma <= 0.0 || in.size() < 2) return in;
  const int radius = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<double> kernel(2 * radius + 1);
  double total = 0.0;
  for (int k = -radius; k <= radius; ++k) {
    kernel[k + radius] = std::exp(-0.5 * (k / sigma) * (k / sigma));
    total += kernel[k + radius];
  }
  for (double& w : kernel) w /= total;
  const int n = static_cast<int>(in.size());
  std::vector<double> out(in.size(), 0.0);
  for (int i = 0; i < n; ++i) {
    double acc = 0.0;
    for (int k = -radius; k <= radius; ++k) {
      acc += kernel[k + radius] * in[std::clamp(i + k, 0, n - 1)];
    }
    out[i] = acc;
  }
  return out;
}

/// Smooth random profile spanning exactly [-amp/2, amp/2].
std::vector<double> random_profile(std::size_t n, double correlation,
                                   double amp, std::uint64_t seed) {
  std::vector<double> profile(n, 0.0);
  if (amp <= 0.0 || n < 2) return profile;
  detail::Rng rng(seed);
  for (double& v : profile) v = rng.normal();
  profile = gaussian_smooth(profile, correlation);
  const auto [lo, hi] = std::minmax_element(profile.begin(), profile.end());
  const double low = *lo;
  const double span = *hi - *lo;
  if (span <= 0.0) return std::vector<double>(n, 0.0);
  for (double& v : profile) v = ((v - low) / span - 0.5) * amp;
  return profile;
}

void check(bool ok, const std::string& message) {
  if (!ok) throw InvalidArgument(message);
}

}  // namespace

std::string to_string(SurfaceKind kind) {
  switch (kind) {
    case SurfaceKind::flat:
      return "flat";
    case SurfaceKind::rough:
      return "rough";
    case SurfaceKind::grass:
      return "grass";
    case SurfaceKind::rough_water:
      return "rough_water";
  }
  return "flat";
}

SurfaceKind parse_surface_kind(const std::string& name) {
  if (name == "flat") return SurfaceKind::flat;
  if (name == "rough") return SurfaceKind::rough;
  if (name == "grass") return SurfaceKind::grass;
  if (name == "rough_water") return SurfaceKind::rough_water;
  throw InvalidArgument("unknown surface kind '" + name +
                        "' (expected flat|rough|grass|rough_water)");
}

std::string to_string(Material material) {
  return material == Material::pec ? "pec" : "pvc";
}

Material parse_material(const std::string& name) {
  if (name == "pec") return Material::pec;
  if (name == "pvc") return Material::pvc;
  throw InvalidArgument("unknown material '" + name + "' (expected pec|pvc)");
}

double SoilSpec::wave_speed() const {
  return kSpeedOfLight / std::sqrt(relative_permittivity);
}

void SceneSpec::validate() const {
  check(height >= 1 && width >= 1, "scene dimensions must be >= 1");
  check(time_window > 0.0, "time window must be positive");
  check(time_zero >= 0.0, "time zero must be non-negative");
  check(wavelet_center_freq > 0.0, "wavelet center frequency must be positive");
  check(trace_spacing > 0.0, "trace spacing must be positive");
  check(soil.relative_permittivity >= 1.0,
        "soil relative permittivity must be >= 1");
  check(soil.heterogeneity_level >= 0.0, "heterogeneity level must be >= 0");
  check(soil.correlation_length > 0.0, "correlation length must be positive");
  check(surface.roughness_amp >= 0.0, "roughness amplitude must be >= 0");
  check(surface.kind != SurfaceKind::flat || surface.roughness_amp == 0.0,
        "flat surface requires roughness amplitude 0");
  check(targets.size() <= 3, "at most 3 targets per scene");
  for (const auto& t : targets) {
    check(t.depth > 0.0, "target depth must be positive");
    check(std::abs(t.reflectivity) <= 1.0, "|reflectivity| must be <= 1");
    check(t.wave_speed > 0.0, "target wave speed must be positive");
    check(t.radius >= 0.0, "target radius must be >= 0");
  }
  for (std::size_t a = 0; a < targets.size(); ++a) {
    for (std::size_t b = a + 1; b < targets.size(); ++b) {
      check(std::abs(targets[a].x0 - targets[b].x0) >=
                targets[a].radius + targets[b].radius,
            "targets overlap horizontally");
    }
  }
}

double ricker(double tau, double center_freq) {
  const double a = kPi * center_freq * tau;
  const double a2 = a * a;
  return (1.0 - 2.0 * a2) * std::exp(-a2);
}

double two_way_time(const TargetSpec& target, double x) {
  const double dx = x - target.x0;
  return 2.0 * std::sqrt(target.depth * target.depth + dx * dx) /
         target.wave_speed;
}

double material_reflectivity(Material material, double soil_permittivity) {
  if (material == Material::pec) return -1.0;
  constexpr double kPvcPermittivity = 3.5;
  const double s = std::sqrt(soil_permittivity);
  const double p = std::sqrt(kPvcPermittivity);
  return (s - p) / (s + p);
}

Radargram synth_target_response(const SceneSpec& scene) {
  scene.validate();
  const std::size_t h = scene.height;
  const std::size_t w = scene.width;
  const double dt = scene.sample_interval();
  std::vector<double> data(h * w, 0.0);
  int clipped = 0;
  for (const auto& target : scene.targets) {
    const double apex_row = scene.row_of_time(2.0 * target.depth / target.wave_speed);
    if (apex_row >= static_cast<double>(h)) ++clipped;
    for (std::size_t j = 0; j < w; ++j) {
      const double t = two_way_time(target, scene.trace_position(j));
      const double slant = 0.5 * t * target.wave_speed;
      const double amplitude = target.reflectivity / std::sqrt(slant);
      for (std::size_t i = 0; i < h; ++i) {
        const double ti = static_cast<double>(i) * dt - scene.time_zero;
        data[i * w + j] += amplitude * ricker(ti - t, scene.wavelet_center_freq);
      }
    }
  }
  std::ostringstream label;
  label << "targets=" << scene.targets.size();
  if (clipped > 0) label << " clipped=" << clipped;
  return Radargram(h, w, std::move(data), scene.trace_spacing,
                   scene.time_window, label.str());
}

std::vector<double> surface_heights(const SceneSpec& scene) {
  if (scene.surface.kind == SurfaceKind::flat) {
    return std::vector<double>(scene.width, 0.0);
  }
  return random_profile(scene.width, surface_correlation(scene.surface.kind),
                        scene.surface.roughness_amp, scene.surface.seed);
}

Radargram synth_clutter(const SceneSpec& scene) {
  scene.validate();
  const std::size_t h = scene.height;
  const std::size_t w = scene.width;
  const double dt = scene.sample_interval();
  const double v = scene.soil.wave_speed();
  const double f = scene.wavelet_center_freq;
  const auto& surface = scene.surface;

  const std::vector<double> heights = surface_heights(scene);
  std::vector<double> gain(w, 1.0);
  if (surface.kind != SurfaceKind::flat && surface.roughness_amp > 0.0) {
    for (std::size_t j = 0; j < w; ++j) {
      gain[j] += kRoughAmplitudeSwing * 2.0 * heights[j] / surface.roughness_amp;
    }
  }
  if (surface.kind == SurfaceKind::rough_water) {
    const auto puddles = random_profile(w, 4.0, 1.0,
                                        detail::splitmix64(surface.seed ^ 0x5757));
    for (std::size_t j = 0; j < w; ++j) {
      if (puddles[j] > 0.1) gain[j] *= kPuddleGain;
    }
  }

  // A raised surface returns earlier; the shift is bounded by amp / v.
  std::vector<double> arrival(w);
  for (std::size_t j = 0; j < w; ++j) arrival[j] = -heights[j] / v;

  std::vector<double> data(h * w, 0.0);
  for (std::size_t j = 0; j < w; ++j) {
    for (std::size_t i = 0; i < h; ++i) {
      const double ti = static_cast<double>(i) * dt - scene.time_zero;
      const double crosstalk =
          kCrosstalkGain * surface.reflection_amp * damped_wavelet(ti + kCrosstalkLead, f);
      const double echo =
          -surface.reflection_amp * gain[j] * damped_wavelet(ti - arrival[j], f);
      data[i * w + j] = crosstalk + echo;
    }
  }

  if (scene.soil.heterogeneity_level > 0.0) {
    detail::Rng rng(derive_seed(scene.seed, 2));
    std::vector<double> field(h * w);
    for (double& x : field) x = rng.normal();
    // Correlate along traces.
    std::vector<double> row(w);
    for (std::size_t i = 0; i < h; ++i) {
      std::copy_n(field.begin() + static_cast<std::ptrdiff_t>(i * w), w, row.begin());
      row = gaussian_smooth(row, scene.soil.correlation_length);
      std::copy(row.begin(), row.end(), field.begin() + static_cast<std::ptrdiff_t>(i * w));
    }
    // Band-limit along time with the source wavelet.
    const int radius = static_cast<int>(std::ceil(1.5 / (f * dt)));
    std::vector<double> wavelet(2 * radius + 1);
    for (int k = -radius; k <= radius; ++k) wavelet[k + radius] = ricker(k * dt, f);
    std::vector<double> shaped(h * w, 0.0);
    const int hi = static_cast<int>(h);
    for (int i = 0; i < hi; ++i) {
      for (int k = -radius; k <= radius; ++k) {
        const int src = i + k;
        if (src < 0 || src >= hi) continue;
        const double wk = wavelet[k + radius];
        for (std::size_t j = 0; j < w; ++j) {
          shaped[static_cast<std::size_t>(i) * w + j] +=
              wk * field[static_cast<std::size_t>(src) * w + j];
        }
      }
    }
    double sum_sq = 0.0;
    for (double x : shaped) sum_sq += x * x;
    const double rms = std::sqrt(sum_sq / static_cast<double>(shaped.size()));
    if (rms > 0.0) {
      const double scale = scene.soil.heterogeneity_level / rms;
      for (std::size_t i = 0; i < h; ++i) {
        const double ti = static_cast<double>(i) * dt - scene.time_zero;
        for (std::size_t j = 0; j < w; ++j) {
          const double onset =
              0.5 * (1.0 + std::tanh((ti - arrival[j]) / kHeterogeneityOnset));
          data[i * w + j] += scale * onset * shaped[i * w + j];
        }
      }
    }
  }

  return Radargram(h, w, std::move(data), scene.trace_spacing, scene.time_window,
                   "clutter surface=" + to_string(surface.kind));
}

DatasetPair synth_pair(const SceneSpec& scene) {
  Radargram clean = synth_target_response(scene);
  const Radargram clutter = synth_clutter(scene);
  std::vector<double> raw(clean.size());
  const auto c = clutter.data();
  const auto t = clean.data();
  for (std::size_t i = 0; i < raw.size(); ++i) raw[i] = c[i] + t[i];
  Radargram raw_scan = clean.with_data(std::move(raw));
  return DatasetPair(std::move(raw_scan), std::move(clean), Provenance::simulated);
}

DatasetPair prepare_pair(const DatasetPair& pair, std::size_t height,
                         std::size_t width) {
  return DatasetPair(prepare(pair.raw, height, width),
                     prepare(pair.clutter_free, height, width), pair.provenance);
}

DatasetPair hybridize(const Radargram& clutter_only, const Radargram& clutter_free,
                      double mix,
                      std::optional<std::pair<std::size_t, std::size_t>> working_size) {
  if (!(mix > 0.0 && mix <= 1.0)) {
    throw InvalidArgument("mix must lie in (0, 1], got " + std::to_string(mix));
  }
  Radargram clutter = clutter_only;
  Radargram clean = clutter_free;
  if (working_size) {
    clutter = resize_bilinear(clutter, working_size->first, working_size->second);
    clean = resize_bilinear(clean, working_size->first, working_size->second);
  }
  if (!clutter.same_shape(clean)) {
    throw InvalidArgument("hybridize shape mismatch: clutter " +
                          std::to_string(clutter.height()) + "x" +
                          std::to_string(clutter.width()) + ", clutter-free " +
                          std::to_string(clean.height()) + "x" +
                          std::to_string(clean.width()));
  }
  const Radargram clutter_n = normalize_unit(clutter);
  Radargram clean_n = normalize_unit(clean);
  std::vector<double> mixed(clean_n.size());
  for (std::size_t i = 0; i < mixed.size(); ++i) {
    mixed[i] = mix * clutter_n.data()[i] + clean_n.data()[i];
  }
  Radargram raw = normalize_unit(clean_n.with_data(std::move(mixed)));
  return DatasetPair(std::move(raw), std::move(clean_n), Provenance::hybrid);
}

const std::vector<SoilKind>& soil_catalog() {
  static const std::vector<SoilKind> catalog{
      {"dry_sand", 3.0, 3.0, 0.0, 4.0},
      {"damp_sand", 8.0, 8.0, 0.0, 4.0},
      {"dry_clay", 10.0, 10.0, 0.0, 4.0},
      {"wet_clay", 12.0, 12.0, 0.0, 4.0},
      {"dry_loam", 10.0, 10.0, 0.0, 4.0},
      {"heterogeneous", 3.0, 8.0, 0.8, 3.0},
  };
  return catalog;
}

const SoilKind& find_soil(const std::string& name) {
  for (const auto& soil : soil_catalog()) {
    if (soil.name == name) return soil;
  }
  throw InvalidArgument("unknown soil '" + name + "'");
}

void DatasetConfig::validate() const {
  check(count > 0, "dataset count must be > 0");
  check(height >= 1 && width >= 1, "working size must be >= 1x1");
  check(render_height >= 1 && render_width >= 1, "render size must be >= 1x1");
  check(!surfaces.empty(), "at least one surface kind required");
  check(!soils.empty(), "at least one soil kind required");
  for (const auto& s : soils) find_soil(s);
  check(!materials.empty(), "at least one material required");
  check(min_targets >= 0 && max_targets <= 3 && min_targets <= max_targets,
        "target count range must lie within [0, 3]");
  check(min_depth > 0.0 && min_depth <= max_depth, "invalid depth range");
  check(min_radius >= 0.0 && min_radius <= max_radius, "invalid radius range");
  check(roughness_amp >= 0.0, "roughness amplitude must be >= 0");
  for (auto start : crop_starts) {
    check(start >= 1 && start - 1 + crop_width <= render_width,
          "crop window [" + std::to_string(start) + ", " +
              std::to_string(start + crop_width - 1) + "] exceeds render width " +
              std::to_string(render_width));
  }
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  return detail::splitmix64(seed ^ detail::splitmix64(index + 0x51ED2701ull));
}

std::vector<SceneSpec> draw_scenes(const DatasetConfig& config) {
  config.validate();
  std::vector<SceneSpec> scenes;
  scenes.reserve(config.count);
  for (std::size_t n = 0; n < config.count; ++n) {
    const std::uint64_t scene_seed = derive_seed(config.seed, n);
    detail::Rng rng(scene_seed);

    SceneSpec scene;
    scene.height = config.render_height;
    scene.width = config.render_width;
    scene.time_window = config.time_window;
    scene.time_zero = config.time_zero;
    scene.wavelet_center_freq = config.wavelet_center_freq;
    scene.trace_spacing = config.trace_spacing;
    scene.seed = scene_seed;

    scene.surface.kind = config.surfaces[rng.index(config.surfaces.size())];
    scene.surface.roughness_amp =
        scene.surface.kind == SurfaceKind::flat ? 0.0 : config.roughness_amp;
    scene.surface.seed = derive_seed(scene_seed, 1);
    scene.surface.reflection_amp = config.surface_reflection_amp;

    const SoilKind& soil = find_soil(config.soils[rng.index(config.soils.size())]);
    scene.soil.relative_permittivity =
        rng.uniform(soil.permittivity_min, soil.permittivity_max);
    scene.soil.heterogeneity_level = soil.heterogeneity_level;
    scene.soil.correlation_length = soil.correlation_length;

    const int n_targets =
        config.min_targets +
        static_cast<int>(rng.index(static_cast<std::size_t>(
            config.max_targets - config.min_targets + 1)));
    const double span = scene.trace_position(scene.width - 1);
    for (int t = 0; t < n_targets; ++t) {
      TargetSpec target;
      target.depth = rng.uniform(config.min_depth, config.max_depth);
      target.radius = rng.uniform(config.min_radius, config.max_radius);
      const Material material = config.materials[rng.index(config.materials.size())];
      target.reflectivity =
          material_reflectivity(material, scene.soil.relative_permittivity);
      target.wave_speed = scene.soil.wave_speed();
      if (n_targets == 1) {
        target.x0 = 0.5 * span;
      } else {
        bool placed = false;
        for (int attempt = 0; attempt < 2000 && !placed; ++attempt) {
          if (attempt == 1000) target.radius = config.min_radius;
          target.x0 = rng.uniform(0.15, 0.85) * span;
          placed = std::all_of(scene.targets.begin(), scene.targets.end(),
                               [&](const TargetSpec& other) {
                                 return std::abs(other.x0 - target.x0) >=
                                        other.radius + target.radius;
                               });
        }
        if (!placed) {
          throw InvalidArgument("cannot place " + std::to_string(n_targets) +
                                " non-overlapping targets in a " +
                                std::to_string(span) + " m aperture");
        }
      }
      scene.targets.push_back(target);
    }
    scenes.push_back(std::move(scene));
  }
  return scenes;
}

Dataset render_dataset(const std::vector<SceneSpec>& scenes,
                       const DatasetConfig& config, std::size_t threads) {
  const std::size_t crops = std::max<std::size_t>(config.crop_starts.size(), 1);
  std::vector<std::optional<DatasetPair>> slots(scenes.size() * crops);
  parallel_for(
      scenes.size(),
      [&](std::size_t n) {
        const DatasetPair pair = synth_pair(scenes[n]);
        for (std::size_t c = 0; c < crops; ++c) {
          Radargram raw = pair.raw;
          Radargram clean = pair.clutter_free;
          std::string label = "scene=" + std::to_string(n);
          if (!config.crop_starts.empty()) {
            const std::size_t start = config.crop_starts[c];
            raw = crop_window(raw, start, config.crop_width);
            clean = crop_window(clean, start, config.crop_width);
            label += " crop=" + std::to_string(start);
          }
          if (config.normalize) {
            raw = prepare(raw, config.height, config.width);
            clean = prepare(clean, config.height, config.width);
          } else {
            raw = resize_bilinear(raw, config.height, config.width);
            clean = resize_bilinear(clean, config.height, config.width);
          }
          slots[n * crops + c].emplace(raw.with_label(label + " " + pair.clutter_free.label()),
                                       clean.with_label(label), Provenance::simulated);
        }
      },
      threads);
  Dataset dataset;
  dataset.seed = config.seed;
  dataset.pairs.reserve(slots.size());
  for (auto& slot : slots) dataset.pairs.push_back(std::move(*slot));
  return dataset;
}

Dataset generate_dataset(const DatasetConfig& config, std::size_t threads) {
  return render_dataset(draw_scenes(config), config, threads);
}

}  // namespace gprd::sim
