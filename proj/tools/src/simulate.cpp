#include <cstdio>
#include <fstream>
#include <ostream>

#include "common.hpp"
#include "gprd/parallel.hpp"
#include "gprd/simulator.hpp"

namespace gprd::cli {

namespace {

json config_to_json(const sim::DatasetConfig& c) {
  json j;
  j["count"] = c.count;
  j["seed"] = c.seed;
  j["height"] = c.height;
  j["width"] = c.width;
  j["render_height"] = c.render_height;
  j["render_width"] = c.render_width;
  std::vector<std::string> surfaces, materials;
  for (auto s : c.surfaces) surfaces.push_back(sim::to_string(s));
  for (auto m : c.materials) materials.push_back(sim::to_string(m));
  j["surfaces"] = surfaces;
  j["soils"] = c.soils;
  j["materials"] = materials;
  j["min_targets"] = c.min_targets;
  j["max_targets"] = c.max_targets;
  j["min_depth"] = c.min_depth;
  j["max_depth"] = c.max_depth;
  j["min_radius"] = c.min_radius;
  j["max_radius"] = c.max_radius;
  j["roughness_amp"] = c.roughness_amp;
  j["surface_reflection_amp"] = c.surface_reflection_amp;
  j["time_window"] = c.time_window;
  j["time_zero"] = c.time_zero;
  j["wavelet_center_freq"] = c.wavelet_center_freq;
  j["trace_spacing"] = c.trace_spacing;
  j["crop_starts"] = c.crop_starts;
  j["crop_width"] = c.crop_width;
  j["normalize"] = c.normalize;
  return j;
}

template <typename V>
void take(const json& j, const char* key, V& dst) {
  if (j.contains(key)) dst = j.at(key).get<V>();
}

void apply_json(const json& j, sim::DatasetConfig& c) {
  static const std::vector<std::string> known{
      "count", "seed", "height", "width", "render_height", "render_width", "surfaces",
      "soils", "materials", "min_targets", "max_targets", "min_depth", "max_depth",
      "min_radius", "max_radius", "roughness_amp", "surface_reflection_amp",
      "time_window", "time_zero", "wavelet_center_freq", "trace_spacing", "crop_starts",
      "crop_width", "normalize", "emit_clutter"};
  for (const auto& [key, value] : j.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw UsageError("unknown simulation config key '" + key + "'");
    }
  }
  take(j, "count", c.count);
  take(j, "seed", c.seed);
  take(j, "height", c.height);
  take(j, "width", c.width);
  take(j, "render_height", c.render_height);
  take(j, "render_width", c.render_width);
  if (j.contains("surfaces")) {
    c.surfaces.clear();
    for (const auto& s : j["surfaces"]) c.surfaces.push_back(sim::parse_surface_kind(s));
  }
  take(j, "soils", c.soils);
  if (j.contains("materials")) {
    c.materials.clear();
    for (const auto& m : j["materials"]) c.materials.push_back(sim::parse_material(m));
  }
  take(j, "min_targets", c.min_targets);
  take(j, "max_targets", c.max_targets);
  take(j, "min_depth", c.min_depth);
  take(j, "max_depth", c.max_depth);
  take(j, "min_radius", c.min_radius);
  take(j, "max_radius", c.max_radius);
  take(j, "roughness_amp", c.roughness_amp);
  take(j, "surface_reflection_amp", c.surface_reflection_amp);
  take(j, "time_window", c.time_window);
  take(j, "time_zero", c.time_zero);
  take(j, "wavelet_center_freq", c.wavelet_center_freq);
  take(j, "trace_spacing", c.trace_spacing);
  take(j, "crop_starts", c.crop_starts);
  take(j, "crop_width", c.crop_width);
  take(j, "normalize", c.normalize);
}

json scene_to_json(const sim::SceneSpec& s, std::size_t index) {
  json j;
  j["index"] = index;
  j["seed"] = s.seed;
  j["surface"] = {{"kind", sim::to_string(s.surface.kind)},
                  {"roughness_amp", s.surface.roughness_amp},
                  {"seed", s.surface.seed},
                  {"reflection_amp", s.surface.reflection_amp}};
  j["soil"] = {{"relative_permittivity", s.soil.relative_permittivity},
               {"heterogeneity_level", s.soil.heterogeneity_level},
               {"correlation_length", s.soil.correlation_length}};
  json targets = json::array();
  for (const auto& t : s.targets) {
    targets.push_back({{"x0", t.x0},
                       {"depth", t.depth},
                       {"radius", t.radius},
                       {"reflectivity", t.reflectivity},
                       {"wave_speed", t.wave_speed}});
  }
  j["targets"] = targets;
  j["target_count"] = s.targets.size();
  return j;
}

std::string scene_name(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "scene_%04zu", index);
  return buf;
}

}  // namespace

void setup_simulate(CLI::App& sub, SimulateOptions& o) {
  sub.add_option("--count", o.count, "Number of scenes (default 10)")
      ->check(CLI::PositiveNumber);
  sub.add_option("--seed", o.seed, "Dataset seed (default 0)");
  sub.add_option("--out", o.out, "Output directory")->required();
  sub.add_option("--size", o.size, "Working size HxW (default 256x64)");
  sub.add_option("--render-size", o.render_size, "Simulated scene size HxW (default: working size)");
  sub.add_option("--surface", o.surfaces, "Surface kinds: flat|rough|grass|rough_water")
      ->delimiter(',');
  sub.add_option("--targets", o.targets, "Targets per scene, N or MIN:MAX (0..3)");
  sub.add_option("--soil", o.soils, "Soil kinds from the catalog")->delimiter(',');
  sub.add_option("--material", o.materials, "Target materials: pec|pvc")->delimiter(',');
  sub.add_option("--config", o.config,
                 "JSON file of dataset settings (a previous manifest works too)");
  sub.add_flag("--emit-clutter", o.emit_clutter,
               "Also write each scene's clutter-only field as *_clutter.gprb");
}

void cmd_simulate(const SimulateOptions& o, std::ostream& log) {
  sim::DatasetConfig cfg;
  bool emit_clutter = o.emit_clutter;
  bool size_from_config = false;
  if (!o.config.empty()) {
    const fs::path p = require_file(o.config, "config file");
    std::ifstream f(p);
    json j;
    try {
      f >> j;
    } catch (const json::exception& e) {
      throw UsageError("config " + o.config + " is not valid JSON: " + e.what());
    }
    if (j.contains("config")) {
      if (j.contains("emit_clutter")) emit_clutter = emit_clutter || j["emit_clutter"].get<bool>();
      j = j["config"];
    }
    try {
      apply_json(j, cfg);
    } catch (const json::exception& e) {
      throw UsageError("config " + o.config + ": " + e.what());
    }
    if (j.contains("emit_clutter")) emit_clutter = emit_clutter || j["emit_clutter"].get<bool>();
    size_from_config = j.contains("height") || j.contains("width");
  }
  // Explicit flags override the config file.
  if (o.count) cfg.count = *o.count;
  if (o.seed) cfg.seed = *o.seed;
  if (o.size || !size_from_config) {
    const auto [h, w] = parse_size(o.size.value_or("256x64"));
    cfg.height = h;
    cfg.width = w;
    if (o.render_size.empty() && cfg.crop_starts.empty()) {
      cfg.render_height = h;
      cfg.render_width = w;
    }
  }
  if (!o.render_size.empty()) {
    const auto [h, w] = parse_size(o.render_size);
    cfg.render_height = h;
    cfg.render_width = w;
  }
  if (!o.surfaces.empty()) {
    cfg.surfaces.clear();
    for (const auto& s : o.surfaces) cfg.surfaces.push_back(sim::parse_surface_kind(s));
  }
  if (!o.targets.empty()) {
    const auto [lo, hi] = parse_range(o.targets, ':');
    cfg.min_targets = static_cast<int>(lo);
    cfg.max_targets = static_cast<int>(hi);
  }
  if (!o.soils.empty()) cfg.soils = o.soils;
  if (!o.materials.empty()) {
    cfg.materials.clear();
    for (const auto& m : o.materials) cfg.materials.push_back(sim::parse_material(m));
  }
  cfg.validate();

  const fs::path out(o.out);
  ensure_out_dir(out);
  const std::vector<sim::SceneSpec> scenes = sim::draw_scenes(cfg);
  const Dataset data = sim::render_dataset(scenes, cfg, thread_limit());
  const std::size_t crops = std::max<std::size_t>(cfg.crop_starts.size(), 1);

  json scene_list = json::array();
  for (std::size_t n = 0; n < scenes.size(); ++n) {
    json sj = scene_to_json(scenes[n], n);
    json files = json::array();
    for (std::size_t c = 0; c < crops; ++c) {
      std::string name = scene_name(n);
      if (!cfg.crop_starts.empty()) {
        name += (c < 10 ? "_c0" : "_c") + std::to_string(c);
      }
      const DatasetPair& pair = data.pairs[n * crops + c];
      write_radargram(out / (name + "_raw.gprb"), pair.raw);
      write_radargram(out / (name + "_gt.gprb"), pair.clutter_free);
      files.push_back(name);
    }
    if (emit_clutter) {
      const Radargram clutter =
          prepare(sim::synth_clutter(scenes[n]), cfg.height, cfg.width).with_label("clutter");
      write_radargram(out / (scene_name(n) + "_clutter.gprb"), clutter);
    }
    sj["files"] = files;
    scene_list.push_back(std::move(sj));
  }

  json extra;
  extra["config"] = config_to_json(cfg);
  extra["emit_clutter"] = emit_clutter;
  extra["scenes"] = scene_list;
  write_manifest(out, "simulate", {"--config", absolute_str((out / "manifest.json").string())},
                 extra);
  log << "wrote " << data.pairs.size() << " pairs (" << cfg.height << "x" << cfg.width
      << ") to " << out.string() << '\n';
}

}  // namespace gprd::cli
