#pragma once

#include <CLI11.hpp>
#include <cstdint>
#include <iosfwd>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "gprd/radargram.hpp"

namespace gprd::cli {

namespace fs = std::filesystem;
using nlohmann::json;

/// Bad flags, missing inputs or inconsistent data: exit code 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::pair<std::size_t, std::size_t> parse_size(const std::string& text);
std::pair<std::size_t, std::size_t> parse_range(const std::string& text, char sep);

fs::path require_dir(const std::string& path, const char* what);
fs::path require_file(const std::string& path, const char* what);
void ensure_out_dir(const fs::path& dir);

/// Scan files sorted by name. With a suffix (e.g. "_raw"), only stems ending in
/// it are returned and the map key is the stem without it.
std::map<std::string, fs::path> list_scans(const fs::path& dir, const std::string& suffix = {});

struct NamedPair {
  std::string name;
  fs::path raw;
  fs::path gt;
};

/// Pairs "<name>_raw.gprb" with "<name>_gt.gprb", sorted by name. Throws
/// UsageError when either side lacks a partner or the directory holds none.
std::vector<NamedPair> list_pairs(const fs::path& dir);

std::string format_number(double v);

/// Records argv (input paths made absolute, --out excluded) so `replay` can
/// rerun the command into a new directory.
void write_manifest(const fs::path& out, const std::string& command,
                    const std::vector<std::string>& argv, json extra = json::object());

std::string absolute_str(const std::string& path);

struct SimulateOptions {
  std::optional<std::size_t> count;  ///< default 10
  std::optional<std::uint64_t> seed;  ///< default 0
  std::string out;
  std::optional<std::string> size;  ///< default 256x64
  std::string render_size;
  std::vector<std::string> surfaces;
  std::string targets;
  std::vector<std::string> soils;
  std::vector<std::string> materials;
  std::string config;
  bool emit_clutter = false;
};

struct HybridizeOptions {
  std::string clutter;
  std::string clean;
  std::string out;
  double mix = 1.0;
  std::size_t per_clutter = 5;
  std::uint64_t seed = 0;
  std::string size = "256x64";
};

struct TrainOptions {
  std::string data;
  std::string out;
  std::size_t epochs = 100;
  std::size_t batch = 40;
  double lr = 1e-4;
  std::string loss = "combined";
  std::size_t base_width = 64;
  std::uint64_t seed = 0;
  std::string size;
  std::size_t max_steps = 0;
  std::string init = "scaled-gaussian";
};

struct DeclutterOptions {
  std::string input;
  std::string out;
  std::string method;
  std::size_t k = 1;
  double lambda = 3e-2;
  double tol = 1e-7;
  std::size_t max_iter = 1000;
  std::string window;
  std::string checkpoint;
  std::string gt;
};

struct EvaluateOptions {
  std::string data;
  std::vector<std::string> processed;
  std::string out;
  bool heatmaps = true;
};

void setup_simulate(CLI::App& sub, SimulateOptions& o);
void setup_hybridize(CLI::App& sub, HybridizeOptions& o);
void setup_train(CLI::App& sub, TrainOptions& o);
void setup_declutter(CLI::App& sub, DeclutterOptions& o);
void setup_evaluate(CLI::App& sub, EvaluateOptions& o);

void cmd_simulate(const SimulateOptions& o, std::ostream& log);
void cmd_hybridize(const HybridizeOptions& o, std::ostream& log);
void cmd_train(const TrainOptions& o, std::ostream& log);
void cmd_declutter(const DeclutterOptions& o, std::ostream& log);
void cmd_evaluate(const EvaluateOptions& o, std::ostream& log);
/// Reruns the command recorded in a manifest, writing into `out`.
std::vector<std::string> replay_args(const std::string& manifest, const std::string& out);

}  // namespace gprd::cli
