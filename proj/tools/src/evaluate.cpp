#include <fstream>
#include <ostream>

#include "common.hpp"
#include "gprd/evaluation.hpp"
#include "gprd/parallel.hpp"
#include "gprd_cli/cli.hpp"

namespace gprd::cli {

void setup_evaluate(CLI::App& sub, EvaluateOptions& o) {
  sub.add_option("--data", o.data, "Directory of *_raw.gprb / *_gt.gprb pairs")->required();
  sub.add_option("--processed", o.processed,
                 "Processed-scan directory, optionally as METHOD=DIR (repeatable)")
      ->required();
  sub.add_option("--out", o.out, "Output directory")->required();
  sub.add_flag("!--no-heatmaps", o.heatmaps, "Skip the PGM heatmaps");
}

void cmd_evaluate(const EvaluateOptions& o, std::ostream& log) {
  const fs::path data_dir = require_dir(o.data, "data");
  const auto pairs = list_pairs(data_dir);

  struct Method {
    std::string name;
    fs::path dir;
    std::map<std::string, fs::path> scans;
  };
  std::vector<Method> methods;
  for (const auto& spec : o.processed) {
    Method m;
    const auto eq = spec.find('=');
    if (eq != std::string::npos) {
      m.name = spec.substr(0, eq);
      m.dir = require_dir(spec.substr(eq + 1), "processed");
    } else {
      m.dir = require_dir(spec, "processed");
      m.name = fs::absolute(m.dir).lexically_normal().filename().string();
      if (m.name.empty()) m.name = fs::absolute(m.dir).parent_path().filename().string();
    }
    m.scans = list_scans(m.dir);
    if (m.scans.size() != pairs.size()) {
      throw UsageError("processed directory " + m.dir.string() + " holds " +
                       std::to_string(m.scans.size()) + " scans but " + data_dir.string() +
                       " holds " + std::to_string(pairs.size()) + " raw/ground-truth pairs");
    }
    for (const auto& p : pairs) {
      if (!m.scans.count(p.name)) {
        throw UsageError("processed directory " + m.dir.string() + " lacks " + p.name +
                         ".gprb");
      }
    }
    methods.push_back(std::move(m));
  }

  const fs::path out(o.out);
  ensure_out_dir(out);
  const fs::path heat = out / "heatmaps";
  if (o.heatmaps) ensure_out_dir(heat);

  std::vector<metrics::ScanMetrics> rows(pairs.size() * methods.size());
  parallel_for(pairs.size(), [&](std::size_t i) {
    const auto& p = pairs[i];
    const Radargram raw = read_radargram(p.raw);
    const Radargram gt = read_radargram(p.gt);
    if (o.heatmaps) {
      write_heatmap(heat / (p.name + "_raw.pgm"), raw);
      write_heatmap(heat / (p.name + "_gt.pgm"), gt);
    }
    for (std::size_t m = 0; m < methods.size(); ++m) {
      const Radargram processed = read_radargram(methods[m].scans.at(p.name));
      if (o.heatmaps) {
        write_heatmap(heat / (p.name + "_" + methods[m].name + ".pgm"), processed);
      }
      auto row = metrics::evaluate_scan(raw, processed, gt);
      row.scan = p.name;
      row.method = methods[m].name;
      rows[m * pairs.size() + i] = row;
    }
  });

  metrics::EvalReport report;
  report.rows = std::move(rows);
  std::ofstream csv(out / "report.csv");
  csv << report.to_csv();
  if (!csv) throw std::runtime_error("failed writing report.csv");

  std::vector<std::string> argv{"--data", absolute_str(o.data)};
  for (const auto& m : methods) {
    argv.insert(argv.end(), {"--processed", m.name + "=" + absolute_str(m.dir.string())});
  }
  if (!o.heatmaps) argv.push_back("--no-heatmaps");
  write_manifest(out, "evaluate", argv);
  for (const auto& agg : report.aggregates()) {
    log << agg.method << ": MAE " << agg.mae << " PSNR " << agg.psnr << " MS-SSIM "
        << agg.ms_ssim << " Im " << agg.improvement_db << " dB\n";
  }
}

}  // namespace gprd::cli
