#include <fstream>
#include <optional>
#include <ostream>

#include "common.hpp"
#include "gprd/classical.hpp"
#include "gprd/evaluation.hpp"
#include "gprd/nn/checkpoint.hpp"
#include "gprd/nn/predict.hpp"
#include "gprd/parallel.hpp"

namespace gprd::cli {

void setup_declutter(CLI::App& sub, DeclutterOptions& o) {
  sub.add_option("--input", o.input, "Scan file or directory of scans")->required();
  sub.add_option("--out", o.out, "Output directory")->required();
  sub.add_option("--method", o.method, "meansub|svd|rpca|crnet")
      ->required()
      ->check(CLI::IsMember({"meansub", "svd", "rpca", "crnet"}));
  sub.add_option("--k", o.k, "Singular components removed by svd")->capture_default_str();
  sub.add_option("--lambda", o.lambda, "Sparsity weight of rpca")->capture_default_str();
  sub.add_option("--tol", o.tol, "Relative residual tolerance of rpca")->capture_default_str();
  sub.add_option("--max-iter", o.max_iter, "Iteration cap of rpca")->capture_default_str();
  sub.add_option("--window", o.window, "Mean-subtraction columns a:b (1-based, inclusive)");
  sub.add_option("--checkpoint", o.checkpoint, "Model checkpoint for crnet");
  sub.add_option("--gt", o.gt, "Ground-truth directory (default: the input directory)");
}

void cmd_declutter(const DeclutterOptions& o, std::ostream& log) {
  const fs::path input(o.input);
  if (!fs::exists(input)) throw UsageError("input path does not exist: " + o.input);
  std::map<std::string, fs::path> scans;
  if (fs::is_directory(input)) {
    scans = list_scans(input, "_raw");
    if (scans.empty()) scans = list_scans(input);
  } else {
    std::string stem = input.stem().string();
    if (stem.size() > 4 && stem.ends_with("_raw")) stem.resize(stem.size() - 4);
    scans.emplace(stem, input);
  }
  if (scans.empty()) throw UsageError("no .gprb scans in " + o.input);

  std::optional<nn::CRNet<float>> model;
  if (o.method == "crnet") {
    if (o.checkpoint.empty()) throw UsageError("--method crnet requires --checkpoint");
    model.emplace(nn::load_checkpoint(require_file(o.checkpoint, "checkpoint")));
  }
  std::optional<std::pair<std::size_t, std::size_t>> window;
  if (!o.window.empty()) {
    window = parse_range(o.window, ':');
    if (window->first == 0) throw UsageError("--window columns are 1-based");
  }
  if (o.method == "svd" && o.k == 0) throw UsageError("--k must be >= 1");

  fs::path gt_dir;
  if (!o.gt.empty()) {
    gt_dir = require_dir(o.gt, "ground-truth");
  } else if (fs::is_directory(input)) {
    gt_dir = input;
  } else {
    gt_dir = input.parent_path().empty() ? fs::path(".") : input.parent_path();
  }

  const fs::path out(o.out);
  ensure_out_dir(out);

  std::vector<std::pair<std::string, fs::path>> items(scans.begin(), scans.end());
  std::vector<std::optional<metrics::ScanMetrics>> rows(items.size());
  std::vector<std::string> notes(items.size());
  parallel_for(items.size(), [&](std::size_t i) {
    const auto& [name, path] = items[i];
    const Radargram raw = read_radargram(path);
    Radargram processed = raw;
    if (o.method == "meansub") {
      processed = window ? classical::mean_subtraction(raw, window->first, window->second)
                         : classical::mean_subtraction(raw);
    } else if (o.method == "svd") {
      processed = classical::svd_removal(raw, o.k);
    } else if (o.method == "rpca") {
      classical::RpcaOptions opts;
      opts.lambda = o.lambda;
      opts.tol = o.tol;
      opts.max_iter = o.max_iter;
      const auto result = classical::rpca_decompose(raw, opts);
      processed = result.sparse;
      notes[i] = "iterations=" + std::to_string(result.iterations) +
                 " converged=" + (result.converged ? "true" : "false");
    } else {
      processed = nn::predict(*model, raw);
    }
    write_radargram(out / (name + ".gprb"), processed.with_label(o.method));
    const fs::path gt_path = gt_dir / (name + "_gt.gprb");
    if (fs::is_regular_file(gt_path)) {
      auto m = metrics::evaluate_scan(raw, processed, read_radargram(gt_path));
      m.scan = name;
      m.method = o.method;
      rows[i] = m;
    }
  });

  std::ofstream report(out / "report.txt");
  report << "method=" << o.method << '\n';
  if (o.method == "meansub") {
    report << "window=" << (o.window.empty() ? std::string("all") : o.window) << '\n';
  } else if (o.method == "svd") {
    report << "k=" << o.k << '\n';
  } else if (o.method == "rpca") {
    report << "lambda=" << format_number(o.lambda) << '\n'
           << "tol=" << format_number(o.tol) << '\n'
           << "max_iter=" << o.max_iter << '\n';
  } else {
    report << "checkpoint=" << absolute_str(o.checkpoint) << '\n';
  }
  report << "scans=" << items.size() << '\n';
  for (std::size_t i = 0; i < items.size(); ++i) {
    report << items[i].first << (notes[i].empty() ? "" : " " + notes[i]) << '\n';
  }
  if (!report) throw std::runtime_error("failed writing report.txt");

  metrics::EvalReport eval;
  for (auto& r : rows) {
    if (r) eval.rows.push_back(*r);
  }
  if (!eval.rows.empty()) {
    std::ofstream csv(out / "metrics.csv");
    csv << eval.to_csv();
    if (!csv) throw std::runtime_error("failed writing metrics.csv");
  }

  std::vector<std::string> argv{"--input", absolute_str(o.input), "--method", o.method};
  if (o.method == "svd") argv.insert(argv.end(), {"--k", std::to_string(o.k)});
  if (o.method == "rpca") {
    argv.insert(argv.end(), {"--lambda", format_number(o.lambda), "--tol",
                             format_number(o.tol), "--max-iter", std::to_string(o.max_iter)});
  }
  if (!o.window.empty()) argv.insert(argv.end(), {"--window", o.window});
  if (!o.checkpoint.empty()) argv.insert(argv.end(), {"--checkpoint", absolute_str(o.checkpoint)});
  if (!o.gt.empty()) argv.insert(argv.end(), {"--gt", absolute_str(o.gt)});
  write_manifest(out, "declutter", argv);
  log << "processed " << items.size() << " scans with " << o.method << " into "
      << out.string() << '\n';
}

}  // namespace gprd::cli
