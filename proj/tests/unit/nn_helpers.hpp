#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "gprd/nn/layers.hpp"
#include "gprd/random.hpp"

namespace gprd::test {

inline nn::Tensor4<double> random_tensor(nn::Shape4 s, std::uint64_t seed, double scale = 1.0) {
  detail::Rng rng(seed);
  nn::Tensor4<double> t(s);
  for (auto& v : t.values()) v = scale * rng.normal();
  return t;
}

inline void randomize(nn::Param<double>& p, std::uint64_t seed, double scale = 0.5) {
  detail::Rng rng(seed);
  for (auto& v : p.value) v = scale * rng.normal();
}

inline double dot(const nn::Tensor4<double>& a, const nn::Tensor4<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a.data()[i] * b.data()[i];
  return s;
}

/// Central difference of f with respect to v[i].
inline double central_difference(std::vector<double>& v, std::size_t i,
                                 const std::function<double()>& f, double h = 1e-6) {
  const double saved = v[i];
  v[i] = saved + h;
  const double plus = f();
  v[i] = saved - h;
  const double minus = f();
  v[i] = saved;
  return (plus - minus) / (2 * h);
}

inline double relative_error(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-8});
}

}  // namespace gprd::test
