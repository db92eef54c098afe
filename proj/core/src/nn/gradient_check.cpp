#include "gprd/nn/gradient_check.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "gprd/random.hpp"
#include "gprd/nn/crnet.hpp"

namespace gprd::nn {

std::string GradientCheckReport::to_text() const {
  std::ostringstream out;
  out.precision(3);
  for (const auto& g : groups) {
    out << g.name << " checked=" << g.checked << " kinks=" << g.kinks
        << " max_rel=" << std::scientific << g.max_rel_error << std::defaultfloat << '\n';
  }
  out << "denominator floor=" << std::scientific << denominator_floor << std::defaultfloat
      << '\n';
  out << "overall checked=" << checked << " kinks=" << kinks << " max_rel=" << std::scientific
      << max_rel_error << std::defaultfloat << (passed ? " PASS" : " FAIL") << '\n';
  return out.str();
}

namespace {

struct Probe {
  double loss;
  std::uint64_t pattern;
};

}  // namespace

GradientCheckReport gradient_check(const GradientCheckOptions& options) {
  CRNetConfig cfg;
  cfg.base_width = options.base_width;
  CRNet<double> model(cfg);
  model.initialize(options.seed);
  detail::Rng rng(detail::splitmix64(options.seed + 17));

  // Nonzero biases and affine parameters so every path carries gradient.
  ParamSet<double> set = model.parameters();
  for (auto* p : set.params) {
    if (p->is_weight) continue;
    for (auto& v : p->value) v += 0.1 * rng.normal();
  }

  const Shape4 shape{options.batch, 1, options.height, options.width};
  Tensor4<double> x(shape);
  for (auto& v : x.values()) v = rng.uniform();
  Tensor4<double> proj(shape);
  for (auto& v : proj.values()) v = rng.normal();

  auto probe = [&](const Tensor4<double>& input) {
    const Tensor4<double> y = model.forward(input, Mode::train);
    double l = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) l += proj.data()[i] * y.data()[i];
    return Probe{l, model.pattern().value};
  };

  model.zero_grad();
  const Probe base = probe(x);
  const Tensor4<double> dx = model.backward(proj);

  double grad_scale = 0.0;
  for (const auto* p : set.params) {
    for (double v : p->grad) grad_scale = std::max(grad_scale, std::abs(v));
  }
  for (double v : dx.values()) grad_scale = std::max(grad_scale, std::abs(v));
  const double floor = std::max(options.floor_fraction * grad_scale,
                                std::numeric_limits<double>::min());

  GradientCheckReport report;
  report.denominator_floor = floor;
  const double h = options.step;
  auto compare = [&](GroupCheck& g, double analytic, double& slot, auto&& eval) {
    const double saved = slot;
    slot = saved + h;
    const Probe plus = eval();
    slot = saved - h;
    const Probe minus = eval();
    slot = saved;
    if (plus.pattern != base.pattern || minus.pattern != base.pattern) {
      ++g.kinks;
      return;
    }
    const double numeric = (plus.loss - minus.loss) / (2.0 * h);
    const double denom =
        std::max({std::abs(analytic), std::abs(numeric), floor});
    g.max_rel_error = std::max(g.max_rel_error, std::abs(analytic - numeric) / denom);
    ++g.checked;
  };

  auto pick = [&](std::size_t n) {
    std::vector<std::size_t> idx;
    if (n <= options.samples_per_group) {
      for (std::size_t i = 0; i < n; ++i) idx.push_back(i);
    } else {
      for (std::size_t k = 0; k < options.samples_per_group; ++k) idx.push_back(rng.index(n));
    }
    return idx;
  };

  for (auto* p : set.params) {
    GroupCheck g{p->name};
    const std::vector<double> analytic = p->grad;
    for (std::size_t i : pick(p->value.size())) {
      compare(g, analytic[i], p->value[i], [&] { return probe(x); });
    }
    report.groups.push_back(g);
  }
  {
    GroupCheck g{"input"};
    Tensor4<double> xp = x;
    for (std::size_t i : pick(x.size())) {
      compare(g, dx.data()[i], xp.data()[i], [&] { return probe(xp); });
    }
    report.groups.push_back(g);
  }

  for (const auto& g : report.groups) {
    report.max_rel_error = std::max(report.max_rel_error, g.max_rel_error);
    report.checked += g.checked;
    report.kinks += g.kinks;
  }
  report.passed = report.checked > 0 && report.max_rel_error <= options.tolerance;
  return report;
}

}  // namespace gprd::nn
