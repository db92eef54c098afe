#include "common.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include "gprd/errors.hpp"
#include "gprd_cli/cli.hpp"

namespace gprd::cli {

namespace {

std::size_t parse_count(std::string_view text, const std::string& whole) {
  std::size_t v = 0;
  auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || p != text.data() + text.size()) {
    throw UsageError("malformed number in '" + whole + "'");
  }
  return v;
}

}  // namespace

std::pair<std::size_t, std::size_t> parse_size(const std::string& text) {
  const auto x = text.find('x');
  if (x == std::string::npos) throw UsageError("size must look like HxW, got '" + text + "'");
  const auto h = parse_count(std::string_view(text).substr(0, x), text);
  const auto w = parse_count(std::string_view(text).substr(x + 1), text);
  if (h == 0 || w == 0) throw UsageError("size components must be >= 1: '" + text + "'");
  return {h, w};
}

std::pair<std::size_t, std::size_t> parse_range(const std::string& text, char sep) {
  const auto at = text.find(sep);
  if (at == std::string::npos) {
    const auto v = parse_count(text, text);
    return {v, v};
  }
  const auto a = parse_count(std::string_view(text).substr(0, at), text);
  const auto b = parse_count(std::string_view(text).substr(at + 1), text);
  if (a > b) throw UsageError("range start exceeds end in '" + text + "'");
  return {a, b};
}

fs::path require_dir(const std::string& path, const char* what) {
  if (path.empty()) throw UsageError(std::string(what) + " directory not given");
  const fs::path p(path);
  if (!fs::is_directory(p)) {
    throw UsageError(std::string(what) + " directory does not exist: " + path);
  }
  return p;
}

fs::path require_file(const std::string& path, const char* what) {
  const fs::path p(path);
  if (!fs::is_regular_file(p)) throw UsageError(std::string(what) + " not found: " + path);
  return p;
}

void ensure_out_dir(const fs::path& dir) {
  if (dir.empty()) throw UsageError("output directory not given (--out)");
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw UsageError("cannot create output directory " + dir.string() + ": " + ec.message());
  }
}

std::map<std::string, fs::path> list_scans(const fs::path& dir, const std::string& suffix) {
  std::map<std::string, fs::path> out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file() || entry.path().extension() != ".gprb") continue;
    std::string stem = entry.path().stem().string();
    if (!suffix.empty()) {
      if (stem.size() <= suffix.size() ||
          stem.compare(stem.size() - suffix.size(), suffix.size(), suffix) != 0) {
        continue;
      }
      stem.resize(stem.size() - suffix.size());
    }
    out.emplace(stem, entry.path());
  }
  return out;
}

std::vector<NamedPair> list_pairs(const fs::path& dir) {
  const auto raws = list_scans(dir, "_raw");
  const auto gts = list_scans(dir, "_gt");
  if (raws.size() != gts.size()) {
    throw UsageError("mismatched raw/ground-truth counts in " + dir.string() + ": " +
                     std::to_string(raws.size()) + " raw vs " + std::to_string(gts.size()) +
                     " ground truth");
  }
  std::vector<NamedPair> out;
  for (const auto& [name, raw] : raws) {
    const auto it = gts.find(name);
    if (it == gts.end()) {
      throw UsageError("no ground truth " + name + "_gt.gprb for " + raw.string());
    }
    out.push_back({name, raw, it->second});
  }
  if (out.empty()) throw UsageError("no *_raw.gprb / *_gt.gprb pairs in " + dir.string());
  return out;
}

std::string format_number(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

std::string absolute_str(const std::string& path) {
  if (path.empty()) return path;
  return fs::absolute(fs::path(path)).lexically_normal().string();
}

void write_manifest(const fs::path& out, const std::string& command,
                    const std::vector<std::string>& argv, json extra) {
  json m = std::move(extra);
  m["command"] = command;
  m["argv"] = argv;
  std::ofstream f(out / "manifest.json");
  f << m.dump(2) << '\n';
  if (!f) throw std::runtime_error("failed writing " + (out / "manifest.json").string());
}

std::vector<std::string> replay_args(const std::string& manifest, const std::string& out) {
  const fs::path p = require_file(manifest, "manifest");
  std::ifstream f(p);
  json m;
  try {
    f >> m;
  } catch (const json::exception& e) {
    throw UsageError("manifest " + manifest + " is not valid JSON: " + e.what());
  }
  if (!m.contains("command") || !m.contains("argv")) {
    throw UsageError("manifest " + manifest + " lacks command/argv");
  }
  std::vector<std::string> args{m["command"].get<std::string>()};
  for (const auto& a : m["argv"]) args.push_back(a.get<std::string>());
  args.push_back("--out");
  args.push_back(out);
  return args;
}

std::vector<unsigned char> heatmap_pixels(const Radargram& r) {
  const Radargram n = normalize_unit(r);
  std::vector<unsigned char> px(n.size());
  for (std::size_t i = 0; i < n.size(); ++i) {
    const double v = std::clamp(n.data()[i], 0.0, 1.0);
    px[i] = static_cast<unsigned char>(std::lround(255.0 * v));
  }
  return px;
}

void write_heatmap(const fs::path& path, const Radargram& r) {
  const auto px = heatmap_pixels(r);
  std::ofstream f(path, std::ios::binary);
  f << "P5\n" << r.width() << ' ' << r.height() << "\n255\n";
  f.write(reinterpret_cast<const char*>(px.data()), static_cast<std::streamsize>(px.size()));
  if (!f) throw std::runtime_error("failed writing " + path.string());
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Clutter removal toolkit for GPR B-scans", "gprd"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  SimulateOptions sim;
  HybridizeOptions hyb;
  TrainOptions trn;
  DeclutterOptions dec;
  EvaluateOptions eva;
  std::string replay_manifest, replay_out;

  auto* s_sim = app.add_subcommand("simulate", "Synthesize raw / clutter-free scan pairs");
  setup_simulate(*s_sim, sim);
  auto* s_hyb = app.add_subcommand("hybridize", "Mix clutter-only scans with clutter-free scans");
  setup_hybridize(*s_hyb, hyb);
  auto* s_trn = app.add_subcommand("train", "Train the clutter-removal network");
  setup_train(*s_trn, trn);
  auto* s_dec = app.add_subcommand("declutter", "Remove clutter with a classical method or a model");
  setup_declutter(*s_dec, dec);
  auto* s_eva = app.add_subcommand("evaluate", "Score processed scans against ground truth");
  setup_evaluate(*s_eva, eva);
  auto* s_rep = app.add_subcommand("replay", "Rerun the command recorded in a manifest");
  s_rep->add_option("manifest", replay_manifest, "manifest.json of a previous run")->required();
  s_rep->add_option("--out", replay_out, "Output directory")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (s_sim->parsed()) cmd_simulate(sim, out);
    if (s_hyb->parsed()) cmd_hybridize(hyb, out);
    if (s_trn->parsed()) cmd_train(trn, out);
    if (s_dec->parsed()) cmd_declutter(dec, out);
    if (s_eva->parsed()) cmd_evaluate(eva, out);
    if (s_rep->parsed()) return run(replay_args(replay_manifest, replay_out), out, err);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace gprd::cli
