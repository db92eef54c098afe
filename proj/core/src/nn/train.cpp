#include "gprd/nn/train.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

#include "gprd/random.hpp"
#include "gprd/errors.hpp"

namespace gprd::nn {

void TrainConfig::validate() const {
  if (batch_size == 0) throw InvalidArgument("batch size must be >= 1");
  if (epochs == 0) throw InvalidArgument("epoch count must be >= 1");
  if (!(lr0 > 0.0) || !std::isfinite(lr0)) {
    throw InvalidArgument("learning rate must be positive");
  }
  if (decay_every == 0) throw InvalidArgument("decay interval must be >= 1");
  if (max_steps && *max_steps == 0) throw InvalidArgument("max steps must be >= 1");
}

std::string TrainHistory::to_csv() const {
  std::ostringstream out;
  out.precision(10);
  out << "epoch,lr,steps,loss,mae,ms_ssim\n";
  for (const auto& e : epochs) {
    out << e.epoch << ',' << e.lr << ',' << e.steps << ',' << e.loss << ',' << e.mae
        << ',' << e.ms_ssim << '\n';
  }
  return out.str();
}

namespace {

std::string divergence_message(std::size_t epoch, std::size_t batch,
                               const metrics::LossValue& v) {
  std::ostringstream out;
  out << "training diverged: non-finite loss at epoch " << epoch << ", batch " << batch
      << " (total=" << v.total << ", mae=" << v.mae << ", mse=" << v.mse
      << ", ms_ssim=" << v.ms_ssim << ")";
  return out.str();
}

}  // namespace

TrainingDiverged::TrainingDiverged(std::size_t epoch, std::size_t batch,
                                   metrics::LossValue parts)
    : std::runtime_error(divergence_message(epoch, batch, parts)),
      epoch_(epoch),
      batch_(batch),
      parts_(parts) {}

template <typename T>
Tensor4<T> to_tensor(const std::vector<const Radargram*>& scans) {
  if (scans.empty()) throw InvalidArgument("cannot build a tensor from zero scans");
  const std::size_t h = scans.front()->height();
  const std::size_t w = scans.front()->width();
  Tensor4<T> out(Shape4{scans.size(), 1, h, w});
  for (std::size_t n = 0; n < scans.size(); ++n) {
    if (scans[n]->height() != h || scans[n]->width() != w) {
      throw InvalidArgument("all scans in a batch must share one shape");
    }
    T* dst = out.channel(n, 0);
    const auto src = scans[n]->data();
    for (std::size_t i = 0; i < src.size(); ++i) dst[i] = static_cast<T>(src[i]);
  }
  return out;
}

template Tensor4<float> to_tensor(const std::vector<const Radargram*>&);
template Tensor4<double> to_tensor(const std::vector<const Radargram*>&);

TrainHistory train(CRNet<float>& model, const Dataset& data, const TrainConfig& cfg,
                   const std::function<void(const EpochRecord&)>& on_epoch) {
  cfg.validate();
  if (data.pairs.empty()) throw InvalidArgument("training dataset is empty");
  const std::size_t h = data.pairs.front().raw.height();
  const std::size_t w = data.pairs.front().raw.width();
  for (const auto& p : data.pairs) {
    if (p.raw.height() != h || p.raw.width() != w) {
      throw InvalidArgument("training pairs must share one shape");
    }
  }
  check_input_shape(Shape4{1, 1, h, w});
  const metrics::ResolvedMsSsim ms = metrics::resolve(cfg.ms_ssim, h, w);

  Adam<float> adam(cfg.adam);
  detail::Rng rng(detail::splitmix64(cfg.seed ^ 0x747261696eull));
  std::vector<std::size_t> order(data.pairs.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  TrainHistory history;
  std::size_t total_steps = 0;
  const std::size_t plane = h * w;
  std::vector<double> y(plane), gt(plane), grad(plane);

  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    if (cfg.max_steps && total_steps >= *cfg.max_steps) break;
    if (cfg.shuffle) {
      for (std::size_t i = order.size(); i > 1; --i) {
        std::swap(order[i - 1], order[rng.index(i)]);
      }
    }
    const double lr = lr_at_epoch(epoch, cfg.lr0, cfg.decay_every, cfg.decay_factor);
    EpochRecord rec;
    rec.epoch = epoch;
    rec.lr = lr;
    std::size_t samples = 0;
    for (std::size_t start = 0, batch = 0; start < order.size();
         start += cfg.batch_size, ++batch) {
      if (cfg.max_steps && total_steps >= *cfg.max_steps) break;
      const std::size_t end = std::min(order.size(), start + cfg.batch_size);
      std::vector<const Radargram*> inputs, targets;
      for (std::size_t k = start; k < end; ++k) {
        inputs.push_back(&data.pairs[order[k]].raw);
        targets.push_back(&data.pairs[order[k]].clutter_free);
      }
      const Tensor4<float> x = to_tensor<float>(inputs);
      model.zero_grad();
      const Tensor4<float> out = model.forward(x, Mode::train);
      Tensor4<float> d_out(out.shape());
      const std::size_t n = end - start;
      metrics::LossValue batch_loss{0.0, 0.0, 0.0, 0.0};
      for (std::size_t s = 0; s < n; ++s) {
        const float* o = out.channel(s, 0);
        const auto t = targets[s]->data();
        for (std::size_t i = 0; i < plane; ++i) {
          y[i] = static_cast<double>(o[i]);
          gt[i] = t[i];
        }
        const metrics::LossValue v =
            metrics::evaluate_loss(cfg.loss, y, gt, h, w, ms, grad);
        batch_loss.total += v.total / static_cast<double>(n);
        batch_loss.mae += v.mae / static_cast<double>(n);
        batch_loss.mse += v.mse / static_cast<double>(n);
        batch_loss.ms_ssim += v.ms_ssim / static_cast<double>(n);
        float* d = d_out.channel(s, 0);
        for (std::size_t i = 0; i < plane; ++i) {
          d[i] = static_cast<float>(grad[i] / static_cast<double>(n));
        }
      }
      if (!std::isfinite(batch_loss.total)) throw TrainingDiverged(epoch, batch, batch_loss);
      model.backward(d_out);
      adam.step(model.parameters(), lr);
      history.step_losses.push_back(batch_loss.total);
      rec.loss += batch_loss.total * static_cast<double>(n);
      rec.mae += batch_loss.mae * static_cast<double>(n);
      rec.ms_ssim += batch_loss.ms_ssim * static_cast<double>(n);
      samples += n;
      ++rec.steps;
      ++total_steps;
    }
    if (samples == 0) break;
    rec.loss /= static_cast<double>(samples);
    rec.mae /= static_cast<double>(samples);
    rec.ms_ssim /= static_cast<double>(samples);
    history.epochs.push_back(rec);
    if (on_epoch) on_epoch(rec);
  }
  return history;
}

}  // namespace gprd::nn
