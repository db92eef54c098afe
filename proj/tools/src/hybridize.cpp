#include <cstdio>
#include <numeric>
#include <ostream>
#include <sstream>

#include "gprd/random.hpp"
#include "common.hpp"
#include "gprd/simulator.hpp"

namespace gprd::cli {

namespace {

std::map<std::string, fs::path> scans_preferring(const fs::path& dir, const std::string& suffix) {
  auto scans = list_scans(dir, suffix);
  if (scans.empty()) scans = list_scans(dir);
  return scans;
}

}  // namespace

void setup_hybridize(CLI::App& sub, HybridizeOptions& o) {
  sub.add_option("--clutter", o.clutter, "Directory of clutter-only scans")->required();
  sub.add_option("--clean", o.clean, "Directory of clutter-free scans")->required();
  sub.add_option("--out", o.out, "Output directory")->required();
  sub.add_option("--mix", o.mix, "Clutter weight in (0, 1]")->capture_default_str();
  sub.add_option("--per-clutter", o.per_clutter, "Clean scans combined with each clutter scan")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  sub.add_option("--seed", o.seed, "Selection seed")->capture_default_str();
  sub.add_option("--size", o.size, "Working size HxW")->capture_default_str();
}

void cmd_hybridize(const HybridizeOptions& o, std::ostream& log) {
  const fs::path clutter_dir = require_dir(o.clutter, "clutter");
  const fs::path clean_dir = require_dir(o.clean, "clean");
  if (!(o.mix > 0.0 && o.mix <= 1.0)) throw UsageError("--mix must lie in (0, 1]");
  const auto size = parse_size(o.size);
  const auto clutter = scans_preferring(clutter_dir, "_clutter");
  const auto clean = scans_preferring(clean_dir, "_gt");
  if (clutter.empty()) throw UsageError("no .gprb scans in " + clutter_dir.string());
  if (clean.empty()) throw UsageError("no .gprb scans in " + clean_dir.string());

  const fs::path out(o.out);
  ensure_out_dir(out);
  std::vector<fs::path> clean_files;
  for (const auto& [name, path] : clean) clean_files.push_back(path);

  detail::Rng rng(detail::splitmix64(o.seed ^ 0x687962726964ull));
  json pairs = json::array();
  std::size_t index = 0;
  for (const auto& [name, clutter_path] : clutter) {
    const Radargram clutter_scan = read_radargram(clutter_path);
    std::vector<std::size_t> order(clean_files.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    const std::size_t take = std::min(o.per_clutter, order.size());
    for (std::size_t i = 0; i < take; ++i) {
      std::swap(order[i], order[i + rng.index(order.size() - i)]);
    }
    for (std::size_t i = 0; i < take; ++i) {
      const fs::path& clean_path = clean_files[order[i]];
      const DatasetPair pair =
          sim::hybridize(clutter_scan, read_radargram(clean_path), o.mix, size);
      char buf[32];
      std::snprintf(buf, sizeof buf, "hybrid_%04zu", index++);
      write_radargram(out / (std::string(buf) + "_raw.gprb"), pair.raw);
      write_radargram(out / (std::string(buf) + "_gt.gprb"), pair.clutter_free);
      pairs.push_back({{"name", buf},
                       {"clutter", clutter_path.filename().string()},
                       {"clean", clean_path.filename().string()}});
    }
  }
  json extra;
  extra["pairs"] = pairs;
  write_manifest(out, "hybridize",
                 {"--clutter", absolute_str(o.clutter), "--clean", absolute_str(o.clean),
                  "--mix", format_number(o.mix), "--per-clutter", std::to_string(o.per_clutter),
                  "--seed", std::to_string(o.seed), "--size", o.size},
                 extra);
  log << "wrote " << index << " hybrid pairs to " << out.string() << '\n';
}

}  // namespace gprd::cli
