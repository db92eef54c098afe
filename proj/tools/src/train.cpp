#include <fstream>
#include <ostream>

#include "common.hpp"
#include "gprd/nn/checkpoint.hpp"
#include "gprd/nn/train.hpp"

namespace gprd::cli {

void setup_train(CLI::App& sub, TrainOptions& o) {
  sub.add_option("--data", o.data, "Directory of *_raw.gprb / *_gt.gprb pairs")->required();
  sub.add_option("--out", o.out, "Output directory (model.crn, loss_history.csv)")->required();
  sub.add_option("--epochs", o.epochs, "Training epochs")->capture_default_str()
      ->check(CLI::PositiveNumber);
  sub.add_option("--batch", o.batch, "Mini-batch size")->capture_default_str()
      ->check(CLI::PositiveNumber);
  sub.add_option("--lr", o.lr, "Initial learning rate (x0.1 every 30 epochs)")
      ->capture_default_str();
  sub.add_option("--loss", o.loss, "combined|mae|mse|msssim")->capture_default_str();
  sub.add_option("--base-width", o.base_width, "Channels of the first encoder level")
      ->capture_default_str();
  sub.add_option("--seed", o.seed, "Initialization and shuffling seed")->capture_default_str();
  sub.add_option("--size", o.size, "Resize pairs to HxW (multiples of 16)");
  sub.add_option("--max-steps", o.max_steps, "Stop after this many optimizer steps (0 = no cap)");
  sub.add_option("--init", o.init, "scaled-gaussian|unit-gaussian")->capture_default_str();
}

void cmd_train(const TrainOptions& o, std::ostream& log) {
  const fs::path data_dir = require_dir(o.data, "data");
  const auto files = list_pairs(data_dir);

  Dataset data;
  data.seed = o.seed;
  for (const auto& f : files) {
    Radargram raw = read_radargram(f.raw);
    Radargram gt = read_radargram(f.gt);
    if (!o.size.empty()) {
      const auto [h, w] = parse_size(o.size);
      raw = prepare(raw, h, w);
      gt = prepare(gt, h, w);
    }
    data.pairs.emplace_back(std::move(raw), std::move(gt));
  }
  const std::size_t h = data.pairs.front().raw.height();
  const std::size_t w = data.pairs.front().raw.width();
  if (h % 16 != 0 || w % 16 != 0) {
    throw UsageError("training scans are " + std::to_string(h) + "x" + std::to_string(w) +
                     "; pass --size with multiples of 16");
  }

  nn::TrainConfig cfg;
  cfg.epochs = o.epochs;
  cfg.batch_size = o.batch;
  cfg.lr0 = o.lr;
  cfg.seed = o.seed;
  cfg.loss = metrics::parse_loss_kind(o.loss);
  if (o.max_steps > 0) cfg.max_steps = o.max_steps;
  cfg.validate();

  nn::CRNetConfig model_cfg;
  model_cfg.base_width = o.base_width;
  nn::CRNet<float> model(model_cfg);
  model.initialize(o.seed, nn::parse_init_kind(o.init));

  const fs::path out(o.out);
  ensure_out_dir(out);
  log << "training on " << data.pairs.size() << " pairs of " << h << "x" << w << ", "
      << model.parameter_count() << " parameters\n";
  const nn::TrainHistory history = nn::train(model, data, cfg, [&log](const nn::EpochRecord& e) {
    log << "epoch " << e.epoch << " lr " << e.lr << " loss " << e.loss << '\n';
  });

  nn::save_checkpoint(out / "model.crn", model);
  std::ofstream csv(out / "loss_history.csv");
  csv << history.to_csv();
  if (!csv) throw std::runtime_error("failed writing loss_history.csv");

  std::vector<std::string> argv{"--data", absolute_str(o.data), "--epochs",
                                std::to_string(o.epochs), "--batch", std::to_string(o.batch),
                                "--lr", format_number(o.lr), "--loss", o.loss,
                                "--base-width", std::to_string(o.base_width), "--seed",
                                std::to_string(o.seed), "--init", o.init};
  if (!o.size.empty()) argv.insert(argv.end(), {"--size", o.size});
  if (o.max_steps > 0) argv.insert(argv.end(), {"--max-steps", std::to_string(o.max_steps)});
  json extra;
  extra["final_loss"] = history.epochs.empty() ? 0.0 : history.epochs.back().loss;
  extra["steps"] = history.step_losses.size();
  write_manifest(out, "train", argv, extra);
}

}  // namespace gprd::cli
