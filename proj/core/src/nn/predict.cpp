#include "gprd/nn/predict.hpp"

#include <algorithm>

namespace gprd::nn {

namespace {

std::size_t round_up16(std::size_t n) { return (n + 15) / 16 * 16; }

}  // namespace

Radargram predict(const CRNet<float>& model, const Radargram& r) {
  const Radargram norm = normalize_unit(r);
  const std::size_t h = r.height();
  const std::size_t w = r.width();
  const std::size_t ph = round_up16(h);
  const std::size_t pw = round_up16(w);
  Tensor4<float> x(Shape4{1, 1, ph, pw});
  for (std::size_t i = 0; i < ph; ++i) {
    const std::size_t si = std::min(i, h - 1);
    for (std::size_t j = 0; j < pw; ++j) {
      x.at(0, 0, i, j) = static_cast<float>(norm(si, std::min(j, w - 1)));
    }
  }
  CRNet<float> local = model;
  const Tensor4<float> y = local.forward(x, Mode::eval);
  std::vector<double> out(h * w);
  for (std::size_t i = 0; i < h; ++i) {
    for (std::size_t j = 0; j < w; ++j) out[i * w + j] = static_cast<double>(y.at(0, 0, i, j));
  }
  return r.with_data(std::move(out));
}

}  // namespace gprd::nn
