#include "gprd/nn/adam.hpp"

#include <cmath>

#include "gprd/errors.hpp"

namespace gprd::nn {

template <typename T>
void Adam<T>::step(const ParamSet<T>& set, double lr) {
  if (m_.empty()) {
    m_.resize(set.params.size());
    v_.resize(set.params.size());
    for (std::size_t i = 0; i < set.params.size(); ++i) {
      m_[i].assign(set.params[i]->value.size(), 0.0);
      v_[i].assign(set.params[i]->value.size(), 0.0);
    }
  }
  if (m_.size() != set.params.size()) {
    throw InvalidArgument("adam: parameter set changed between steps");
  }
  ++t_;
  const double b1 = cfg_.beta1;
  const double b2 = cfg_.beta2;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(t_));
  for (std::size_t i = 0; i < set.params.size(); ++i) {
    Param<T>& p = *set.params[i];
    auto& m = m_[i];
    auto& v = v_[i];
    for (std::size_t j = 0; j < p.value.size(); ++j) {
      const double g = static_cast<double>(p.grad[j]);
      m[j] = b1 * m[j] + (1.0 - b1) * g;
      v[j] = b2 * v[j] + (1.0 - b2) * g * g;
      const double m_hat = m[j] / c1;
      const double v_hat = v[j] / c2;
      p.value[j] = static_cast<T>(static_cast<double>(p.value[j]) -
                                  lr * m_hat / (std::sqrt(v_hat) + cfg_.eps));
    }
  }
}

double lr_at_epoch(std::size_t epoch, double lr0, std::size_t every, double factor) {
  if (every == 0) throw InvalidArgument("learning-rate decay interval must be >= 1");
  return lr0 * std::pow(factor, static_cast<double>(epoch / every));
}

template class Adam<float>;
template class Adam<double>;

}  // namespace gprd::nn
