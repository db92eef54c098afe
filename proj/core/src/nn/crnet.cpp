#include "gprd/nn/crnet.hpp"

#include <cmath>

#include "gprd/random.hpp"
#include "gprd/errors.hpp"

namespace gprd::nn {

void CRNetConfig::validate() const {
  if (base_width < 3) {
    throw InvalidArgument("base width must be >= 3 so the growth rate is >= 1, got " +
                          std::to_string(base_width));
  }
  if (depth != 4) throw InvalidArgument("network depth is fixed at 4 levels");
  if (rdb_layers != 3) throw InvalidArgument("residual dense blocks have exactly 3 layers");
  if (!(bn_momentum > 0.0 && bn_momentum <= 1.0)) {
    throw InvalidArgument("batch-norm momentum must lie in (0, 1]");
  }
  if (!(bn_eps > 0.0)) throw InvalidArgument("batch-norm eps must be positive");
}

std::string to_string(InitKind kind) {
  return kind == InitKind::unit_gaussian ? "unit-gaussian" : "scaled-gaussian";
}

InitKind parse_init_kind(const std::string& name) {
  if (name == "scaled-gaussian") return InitKind::scaled_gaussian;
  if (name == "unit-gaussian") return InitKind::unit_gaussian;
  throw InvalidArgument("unknown init '" + name + "' (expected scaled-gaussian|unit-gaussian)");
}

void check_input_shape(const Shape4& s) {
  if (s.c != 1) {
    throw InvalidArgument("network input must have 1 channel, got " + to_string(s));
  }
  if (s.h % 16 != 0 || s.w % 16 != 0) {
    throw InvalidArgument("network input " + to_string(s) +
                          " has spatial size not divisible by 16; resize or pad the scan");
  }
}

template <typename T>
CRNet<T>::CRNet(const CRNetConfig& cfg) : cfg_(cfg) {
  cfg_.validate();
  const double m = cfg_.bn_momentum;
  const double e = cfg_.bn_eps;
  std::size_t in = 1;
  for (std::size_t i = 0; i < kLevels; ++i) {
    const std::size_t c = cfg_.level_channels(i);
    const std::string lvl = std::to_string(i);
    encoders_[i] = DoubleConv<T>("enc" + lvl, in, c, m, e);
    rdbs_[i] = ResidualDenseBlock<T>("rdb" + lvl, c);
    const std::size_t below = i + 1 < kLevels ? cfg_.level_channels(i + 1)
                                              : cfg_.bottleneck_channels();
    decoders_[i] = DoubleConv<T>("dec" + lvl, c + below, c, m, e);
    in = c;
  }
  bottleneck_ = DoubleConv<T>("bottleneck", in, cfg_.bottleneck_channels(), m, e);
  head0_ = ConvBnRelu<T>("head0", cfg_.base_width, cfg_.base_width, m, e);
  head1_ = ConvBnRelu<T>("head1", cfg_.base_width, cfg_.base_width, m, e);
  out_ = Conv2d<T>("out", cfg_.base_width, 1, 1);
}

template <typename T>
Tensor4<T> CRNet<T>::forward(const Tensor4<T>& x, Mode mode) {
  check_input_shape(x.shape());
  std::array<Tensor4<T>, kLevels> skips;
  Tensor4<T> cur = x;
  for (std::size_t i = 0; i < kLevels; ++i) {
    skips[i] = encoders_[i].forward(cur, mode);
    cur = pools_[i].forward(skips[i]);
  }
  cur = bottleneck_.forward(cur, mode);
  for (std::size_t i = kLevels; i-- > 0;) {
    Tensor4<T> up = ups_[i].forward(cur);
    Tensor4<T> refined = rdbs_[i].forward(skips[i]);
    cur = decoders_[i].forward(concat_channels(refined, up), mode);
  }
  cur = head1_.forward(head0_.forward(cur, mode), mode);
  return out_.forward(cur);
}

template <typename T>
Tensor4<T> CRNet<T>::backward(const Tensor4<T>& grad_out) {
  Tensor4<T> g = head0_.backward(head1_.backward(out_.backward(grad_out)));
  std::array<Tensor4<T>, kLevels> d_skips;
  for (std::size_t i = 0; i < kLevels; ++i) {
    Tensor4<T> d_cat = decoders_[i].backward(g);
    Tensor4<T> d_refined, d_up;
    split_channels(d_cat, cfg_.level_channels(i), d_refined, d_up);
    d_skips[i] = rdbs_[i].backward(d_refined);
    g = ups_[i].backward(d_up);
  }
  g = bottleneck_.backward(g);
  for (std::size_t i = kLevels; i-- > 0;) {
    Tensor4<T> d_skip = pools_[i].backward(g);
    d_skip += d_skips[i];
    g = encoders_[i].backward(d_skip);
  }
  return g;
}

template <typename T>
ParamSet<T> CRNet<T>::parameters() {
  ParamSet<T> set;
  for (auto& e : encoders_) e.collect(set);
  bottleneck_.collect(set);
  for (auto& r : rdbs_) r.collect(set);
  for (auto& d : decoders_) d.collect(set);
  head0_.collect(set);
  head1_.collect(set);
  out_.collect(set);
  return set;
}

template <typename T>
void CRNet<T>::zero_grad() {
  for (auto* p : parameters().params) std::fill(p->grad.begin(), p->grad.end(), T{0});
}

template <typename T>
void CRNet<T>::initialize(std::uint64_t seed, InitKind kind) {
  detail::Rng rng(seed);
  for (auto* p : parameters().params) {
    std::fill(p->grad.begin(), p->grad.end(), T{0});
    if (!p->is_weight) continue;
    const double stddev = kind == InitKind::unit_gaussian
                              ? 1.0
                              : 1.0 / std::sqrt(static_cast<double>(p->fan_in));
    for (auto& v : p->value) v = static_cast<T>(stddev * rng.normal());
  }
}

template <typename T>
std::size_t CRNet<T>::parameter_count() {
  std::size_t n = 0;
  for (auto* p : parameters().params) n += p->value.size();
  return n;
}

template <typename T>
void CRNet<T>::mark_running_stats() {
  for (auto& e : encoders_) e.mark_running_stats();
  for (auto& d : decoders_) d.mark_running_stats();
  bottleneck_.mark_running_stats();
  head0_.mark_running_stats();
  head1_.mark_running_stats();
}

template <typename T>
PatternHash CRNet<T>::pattern() const {
  PatternHash h;
  for (std::size_t i = 0; i < kLevels; ++i) {
    encoders_[i].hash_pattern(h);
    pools_[i].hash_pattern(h);
    rdbs_[i].hash_pattern(h);
    decoders_[i].hash_pattern(h);
  }
  bottleneck_.hash_pattern(h);
  head0_.hash_pattern(h);
  head1_.hash_pattern(h);
  return h;
}

template class CRNet<float>;
template class CRNet<double>;

}  // namespace gprd::nn
