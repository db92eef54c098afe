#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "gprd/radargram.hpp"
#include "gprd/random.hpp"

namespace gprd::test {

inline std::vector<double> random_values(std::size_t n, std::uint64_t seed, double lo = 0.0,
                                         double hi = 1.0) {
  detail::Rng rng(seed);
  std::vector<double> v(n);
  for (auto& x : v) x = rng.uniform(lo, hi);
  return v;
}

inline Radargram random_scan(std::size_t h, std::size_t w, std::uint64_t seed,
                             double lo = 0.0, double hi = 1.0) {
  return Radargram(h, w, random_values(h * w, seed, lo, hi));
}

/// Rank-one matrix u v^T.
inline Radargram outer(const std::vector<double>& u, const std::vector<double>& v) {
  std::vector<double> d(u.size() * v.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    for (std::size_t j = 0; j < v.size(); ++j) d[i * v.size() + j] = u[i] * v[j];
  }
  return Radargram(u.size(), v.size(), std::move(d));
}

inline double frobenius(const Radargram& r) {
  double s = 0.0;
  for (double v : r.data()) s += v * v;
  return std::sqrt(s);
}

}  // namespace gprd::test
