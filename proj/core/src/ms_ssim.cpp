#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "gprd/errors.hpp"
#include "gprd/metrics.hpp"

namespace gprd::metrics {

namespace {

/// Row-major image plane used inside the MS-SSIM pipeline.
struct Plane {
  std::size_t h = 0;
  std::size_t w = 0;
  std::vector<double> v;

  Plane() = default;
  Plane(std::size_t rows, std::size_t cols, double fill = 0.0)
      : h(rows), w(cols), v(rows * cols, fill) {}
  double& at(std::size_t i, std::size_t j) { return v[i * w + j]; }
  double at(std::size_t i, std::size_t j) const { return v[i * w + j]; }
};

/// Separable "valid" correlation with a vertical and a horizontal kernel.
struct Filter {
  std::vector<double> vertical;
  std::vector<double> horizontal;

  std::size_t out_h(std::size_t h) const { return h - vertical.size() + 1; }
  std::size_t out_w(std::size_t w) const { return w - horizontal.size() + 1; }

  Plane apply(const Plane& x) const {
    const std::size_t oh = out_h(x.h);
    const std::size_t ow = out_w(x.w);
    Plane tmp(x.h, ow);
    for (std::size_t i = 0; i < x.h; ++i) {
      for (std::size_t j = 0; j < ow; ++j) {
        double acc = 0.0;
        for (std::size_t q = 0; q < horizontal.size(); ++q) {
          acc += horizontal[q] * x.at(i, j + q);
        }
        tmp.at(i, j) = acc;
      }
    }
    Plane out(oh, ow);
    for (std::size_t i = 0; i < oh; ++i) {
      for (std::size_t p = 0; p < vertical.size(); ++p) {
        const double k = vertical[p];
        for (std::size_t j = 0; j < ow; ++j) out.at(i, j) += k * tmp.at(i + p, j);
      }
    }
    return out;
  }

  /// Adjoint of apply: scatters an output-sized plane back to h x w.
  Plane transpose(const Plane& g, std::size_t h, std::size_t w) const {
    Plane tmp(h, g.w);
    for (std::size_t i = 0; i < g.h; ++i) {
      for (std::size_t p = 0; p < vertical.size(); ++p) {
        const double k = vertical[p];
        for (std::size_t j = 0; j < g.w; ++j) tmp.at(i + p, j) += k * g.at(i, j);
      }
    }
    Plane out(h, w);
    for (std::size_t i = 0; i < h; ++i) {
      for (std::size_t j = 0; j < g.w; ++j) {
        const double t = tmp.at(i, j);
        for (std::size_t q = 0; q < horizontal.size(); ++q) {
          out.at(i, j + q) += horizontal[q] * t;
        }
      }
    }
    return out;
  }
};

std::vector<double> gaussian_kernel(int size, double sigma) {
  std::vector<double> k(static_cast<std::size_t>(size));
  const double center = 0.5 * (size - 1);
  double total = 0.0;
  for (int i = 0; i < size; ++i) {
    const double d = (i - center) / sigma;
    k[static_cast<std::size_t>(i)] = std::exp(-0.5 * d * d);
    total += k[static_cast<std::size_t>(i)];
  }
  for (double& v : k) v /= total;
  return k;
}

Filter make_filter(const ResolvedMsSsim& cfg, std::size_t h, std::size_t w) {
  if (cfg.moments == MomentMode::global) {
    return Filter{std::vector<double>(h, 1.0 / static_cast<double>(h)),
                  std::vector<double>(w, 1.0 / static_cast<double>(w))};
  }
  auto k = gaussian_kernel(cfg.window_size, cfg.window_sigma);
  return Filter{k, k};
}

/// 2x2 average followed by decimation by two.
Plane downsample(const Plane& x) {
  Plane out(x.h / 2, x.w / 2);
  for (std::size_t i = 0; i < out.h; ++i) {
    for (std::size_t j = 0; j < out.w; ++j) {
      out.at(i, j) = 0.25 * (x.at(2 * i, 2 * j) + x.at(2 * i, 2 * j + 1) +
                             x.at(2 * i + 1, 2 * j) + x.at(2 * i + 1, 2 * j + 1));
    }
  }
  return out;
}

void downsample_transpose_add(const Plane& g, Plane& into) {
  for (std::size_t i = 0; i < g.h; ++i) {
    for (std::size_t j = 0; j < g.w; ++j) {
      const double q = 0.25 * g.at(i, j);
      into.at(2 * i, 2 * j) += q;
      into.at(2 * i, 2 * j + 1) += q;
      into.at(2 * i + 1, 2 * j) += q;
      into.at(2 * i + 1, 2 * j + 1) += q;
    }
  }
}

Plane product(const Plane& a, const Plane& b) {
  Plane out(a.h, a.w);
  for (std::size_t i = 0; i < a.v.size(); ++i) out.v[i] = a.v[i] * b.v[i];
  return out;
}

std::size_t scale_extent(std::size_t n, int scale) {
  for (int s = 1; s < scale; ++s) n /= 2;
  return n;
}

}  // namespace

int max_scales(std::size_t height, std::size_t width, int window_size) {
  const auto win = static_cast<std::size_t>(std::max(window_size, 1));
  int m = 0;
  std::size_t h = height;
  std::size_t w = width;
  while (h >= win && w >= win) {
    ++m;
    h /= 2;
    w /= 2;
  }
  return m;
}

ResolvedMsSsim resolve(const MsSsimConfig& cfg, std::size_t height,
                       std::size_t width) {
  if (height == 0 || width == 0) throw InvalidArgument("ms_ssim on empty image");
  if (cfg.window_size < 1 || !(cfg.window_sigma > 0.0) || !(cfg.dynamic_range > 0.0)) {
    throw InvalidArgument("ms_ssim requires window_size >= 1, sigma > 0, R > 0");
  }
  ResolvedMsSsim out{};
  out.window_size = cfg.window_size;
  out.window_sigma = cfg.window_sigma;
  out.moments = cfg.moments;
  out.c1 = (cfg.k1 * cfg.dynamic_range) * (cfg.k1 * cfg.dynamic_range);
  out.c2 = (cfg.k2 * cfg.dynamic_range) * (cfg.k2 * cfg.dynamic_range);

  const int fit_window = cfg.moments == MomentMode::global ? 1 : cfg.window_size;
  if (cfg.scales > 0) {
    const int admissible = max_scales(height, width, fit_window);
    if (cfg.scales > admissible) {
      throw InvalidArgument(
          "ms_ssim: " + std::to_string(height) + "x" + std::to_string(width) +
          " image is smaller than the " + std::to_string(fit_window) +
          "-tap window at scale " + std::to_string(cfg.scales) +
          "; maximum admissible scales M = " + std::to_string(admissible));
    }
    out.scales = cfg.scales;
  } else {
    const int target = (height >= 176 && width >= 176) ? 5 : 3;
    int admissible = max_scales(height, width, fit_window);
    if (cfg.moments == MomentMode::windowed && admissible < target &&
        cfg.allow_small_window && cfg.window_size > 7) {
      const int small = max_scales(height, width, 7);
      if (small > admissible) {
        out.window_size = 7;
        admissible = small;
      }
    }
    if (admissible < 1) {
      throw InvalidArgument("ms_ssim: " + std::to_string(height) + "x" +
                            std::to_string(width) +
                            " image is smaller than the window; maximum admissible "
                            "scales M = 0");
    }
    out.scales = std::min(target, admissible);
  }

  std::vector<double> base = cfg.weights.empty()
                                 ? std::vector<double>(std::begin(kReferenceScaleWeights),
                                                       std::end(kReferenceScaleWeights))
                                 : cfg.weights;
  if (static_cast<int>(base.size()) < out.scales) {
    throw InvalidArgument("ms_ssim: " + std::to_string(out.scales) +
                          " scales requested but only " + std::to_string(base.size()) +
                          " exponents available");
  }
  base.resize(static_cast<std::size_t>(out.scales));
  const double total = std::accumulate(base.begin(), base.end(), 0.0);
  if (!(total > 0.0)) throw InvalidArgument("ms_ssim exponents must sum to > 0");
  for (double& w : base) w /= total;
  out.weights = std::move(base);
  return out;
}

double ms_ssim(std::span<const double> y, std::span<const double> gt,
               std::size_t height, std::size_t width, const ResolvedMsSsim& cfg,
               std::span<double> grad_y) {
  if (y.size() != height * width || gt.size() != height * width) {
    throw InvalidArgument("ms_ssim: buffer sizes do not match " +
                          std::to_string(height) + "x" + std::to_string(width));
  }
  if (!grad_y.empty() && grad_y.size() != y.size()) {
    throw InvalidArgument("ms_ssim: gradient buffer size mismatch");
  }
  const int m = cfg.scales;
  const std::size_t fit = cfg.moments == MomentMode::global
                              ? 1
                              : static_cast<std::size_t>(cfg.window_size);
  if (scale_extent(height, m) < fit || scale_extent(width, m) < fit) {
    throw InvalidArgument("ms_ssim: window does not fit the coarsest of " +
                          std::to_string(m) + " scales; maximum admissible M = " +
                          std::to_string(max_scales(height, width, static_cast<int>(fit))));
  }

  std::vector<Plane> xs(static_cast<std::size_t>(m));
  std::vector<Plane> gs(static_cast<std::size_t>(m));
  xs[0] = Plane(height, width);
  gs[0] = Plane(height, width);
  std::copy(y.begin(), y.end(), xs[0].v.begin());
  std::copy(gt.begin(), gt.end(), gs[0].v.begin());
  for (int k = 1; k < m; ++k) {
    xs[k] = downsample(xs[k - 1]);
    gs[k] = downsample(gs[k - 1]);
  }

  struct ScaleStats {
    Filter filter;
    Plane mx, my, cs, lum, big_a, big_b, q;
    double value = 0.0;
  };
  std::vector<ScaleStats> stats(static_cast<std::size_t>(m));
  const double c1 = cfg.c1;
  const double c2 = cfg.c2;

  for (int k = 0; k < m; ++k) {
    auto& s = stats[static_cast<std::size_t>(k)];
    const Plane& x = xs[k];
    const Plane& g = gs[k];
    s.filter = make_filter(cfg, x.h, x.w);
    s.mx = s.filter.apply(x);
    s.my = s.filter.apply(g);
    const Plane exx = s.filter.apply(product(x, x));
    const Plane eyy = s.filter.apply(product(g, g));
    const Plane exy = s.filter.apply(product(x, g));
    const std::size_t n = s.mx.v.size();
    s.cs = Plane(s.mx.h, s.mx.w);
    s.lum = Plane(s.mx.h, s.mx.w);
    s.big_a = Plane(s.mx.h, s.mx.w);
    s.big_b = Plane(s.mx.h, s.mx.w);
    s.q = Plane(s.mx.h, s.mx.w);
    const bool coarsest = k == m - 1;
    double acc = 0.0;
    for (std::size_t p = 0; p < n; ++p) {
      const double mx = s.mx.v[p];
      const double my = s.my.v[p];
      const double vxx = exx.v[p] - mx * mx;
      const double vyy = eyy.v[p] - my * my;
      const double vxy = exy.v[p] - mx * my;
      // contrast * structure with C3 = C2 / 2 collapses to one ratio.
      const double a = 2.0 * vxy + c2;
      const double b = vxx + vyy + c2;
      s.big_a.v[p] = a;
      s.big_b.v[p] = b;
      s.cs.v[p] = a / b;
      const double q = mx * mx + my * my + c1;
      s.q.v[p] = q;
      s.lum.v[p] = (2.0 * mx * my + c1) / q;
      acc += coarsest ? s.lum.v[p] * s.cs.v[p] : s.cs.v[p];
    }
    s.value = acc / static_cast<double>(n);
  }

  // Fractional powers of a negative per-scale score are undefined; such
  // scales contribute zero (exponent 1 keeps the signed value).
  auto powered = [](double v, double w) {
    if (w == 1.0) return v;
    return v > 0.0 ? std::pow(v, w) : 0.0;
  };
  auto powered_derivative = [](double v, double w) {
    if (w == 1.0) return 1.0;
    return v > 0.0 ? w * std::pow(v, w - 1.0) : 0.0;
  };

  double result = 1.0;
  for (int k = 0; k < m; ++k) {
    result *= powered(stats[static_cast<std::size_t>(k)].value,
                      cfg.weights[static_cast<std::size_t>(k)]);
  }
  if (grad_y.empty()) return result;

  Plane carry;  // gradient w.r.t. the image at the current scale
  for (int k = m - 1; k >= 0; --k) {
    const auto& s = stats[static_cast<std::size_t>(k)];
    double others = 1.0;
    for (int j = 0; j < m; ++j) {
      if (j != k) {
        others *= powered(stats[static_cast<std::size_t>(j)].value,
                          cfg.weights[static_cast<std::size_t>(j)]);
      }
    }
    const double coef = others * powered_derivative(s.value, cfg.weights[static_cast<std::size_t>(k)]);
    const Plane& x = xs[k];
    const Plane& g = gs[k];
    Plane grad_here(x.h, x.w);
    if (coef != 0.0) {
      const std::size_t n = s.mx.v.size();
      const double inv_n = coef / static_cast<double>(n);
      const bool coarsest = k == m - 1;
      Plane gm(s.mx.h, s.mx.w), gxx(s.mx.h, s.mx.w), gxy(s.mx.h, s.mx.w);
      for (std::size_t p = 0; p < n; ++p) {
        const double mx = s.mx.v[p];
        const double my = s.my.v[p];
        const double a = s.big_a.v[p];
        const double b = s.big_b.v[p];
        const double dcs_dmx = -2.0 * my / b + 2.0 * mx * a / (b * b);
        const double dcs_dexx = -a / (b * b);
        const double dcs_dexy = 2.0 / b;
        double w_cs = inv_n;
        double dl = 0.0;
        if (coarsest) {
          w_cs = inv_n * s.lum.v[p];
          const double q = s.q.v[p];
          const double dl_dmx = 2.0 * my / q - 2.0 * mx * (2.0 * mx * my + c1) / (q * q);
          dl = inv_n * s.cs.v[p] * dl_dmx;
        }
        gm.v[p] = w_cs * dcs_dmx + dl;
        gxx.v[p] = w_cs * dcs_dexx;
        gxy.v[p] = w_cs * dcs_dexy;
      }
      const Plane tm = s.filter.transpose(gm, x.h, x.w);
      const Plane txx = s.filter.transpose(gxx, x.h, x.w);
      const Plane txy = s.filter.transpose(gxy, x.h, x.w);
      for (std::size_t p = 0; p < grad_here.v.size(); ++p) {
        grad_here.v[p] = tm.v[p] + 2.0 * x.v[p] * txx.v[p] + g.v[p] * txy.v[p];
      }
    }
    if (!carry.v.empty()) downsample_transpose_add(carry, grad_here);
    carry = std::move(grad_here);
  }
  std::copy(carry.v.begin(), carry.v.end(), grad_y.begin());
  return result;
}

double ms_ssim(const Radargram& y, const Radargram& gt, const MsSsimConfig& cfg) {
  if (!y.same_shape(gt)) {
    throw InvalidArgument("ms_ssim: shape mismatch");
  }
  const auto resolved = resolve(cfg, y.height(), y.width());
  return ms_ssim(y.data(), gt.data(), y.height(), y.width(), resolved);
}

}  // namespace gprd::metrics
