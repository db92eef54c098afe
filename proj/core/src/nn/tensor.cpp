#include "gprd/nn/tensor.hpp"

#include <algorithm>
#include <cmath>

#include "gprd/errors.hpp"

namespace gprd::nn {

std::string to_string(const Shape4& s) {
  return std::to_string(s.n) + "x" + std::to_string(s.c) + "x" + std::to_string(s.h) +
         "x" + std::to_string(s.w);
}

template <typename T>
Tensor4<T>::Tensor4(Shape4 shape, T fill) : shape_(shape), values_(shape.count(), fill) {
  if (shape.count() == 0) throw InvalidArgument("tensor shape components must be >= 1");
}

template <typename T>
Tensor4<T>::Tensor4(Shape4 shape, std::vector<T> values)
    : shape_(shape), values_(std::move(values)) {
  if (shape.count() == 0) throw InvalidArgument("tensor shape components must be >= 1");
  if (values_.size() != shape.count()) {
    throw InvalidArgument("tensor value count " + std::to_string(values_.size()) +
                          " does not match shape " + to_string(shape));
  }
}

template <typename T>
void Tensor4<T>::fill(T value) {
  std::fill(values_.begin(), values_.end(), value);
}

template <typename T>
Tensor4<T>& Tensor4<T>::operator+=(const Tensor4& other) {
  if (!(shape_ == other.shape_)) {
    throw InvalidArgument("tensor add: shape " + to_string(shape_) + " vs " +
                          to_string(other.shape_));
  }
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
  return *this;
}

template <typename T>
void Tensor4<T>::require_finite(const char* what) const {
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) {
      throw InvalidArgument(std::string(what) + ": non-finite value at flat index " +
                            std::to_string(i));
    }
  }
}

template <typename T>
Tensor4<T> concat_channels(const Tensor4<T>& a, const Tensor4<T>& b) {
  const Shape4& sa = a.shape();
  const Shape4& sb = b.shape();
  if (sa.n != sb.n || sa.h != sb.h || sa.w != sb.w) {
    throw InvalidArgument("concat: incompatible shapes " + to_string(sa) + " and " +
                          to_string(sb));
  }
  Tensor4<T> out(Shape4{sa.n, sa.c + sb.c, sa.h, sa.w});
  const std::size_t pa = sa.c * sa.plane();
  const std::size_t pb = sb.c * sb.plane();
  for (std::size_t n = 0; n < sa.n; ++n) {
    T* dst = out.channel(n, 0);
    std::copy_n(a.channel(n, 0), pa, dst);
    std::copy_n(b.channel(n, 0), pb, dst + pa);
  }
  return out;
}

template <typename T>
void split_channels(const Tensor4<T>& x, std::size_t first, Tensor4<T>& head,
                    Tensor4<T>& tail) {
  const Shape4& s = x.shape();
  if (first == 0 || first >= s.c) throw InvalidArgument("split: invalid channel split");
  head = Tensor4<T>(Shape4{s.n, first, s.h, s.w});
  tail = Tensor4<T>(Shape4{s.n, s.c - first, s.h, s.w});
  const std::size_t ph = first * s.plane();
  const std::size_t pt = (s.c - first) * s.plane();
  for (std::size_t n = 0; n < s.n; ++n) {
    const T* src = x.channel(n, 0);
    std::copy_n(src, ph, head.channel(n, 0));
    std::copy_n(src + ph, pt, tail.channel(n, 0));
  }
}

template class Tensor4<float>;
template class Tensor4<double>;
template Tensor4<float> concat_channels(const Tensor4<float>&, const Tensor4<float>&);
template Tensor4<double> concat_channels(const Tensor4<double>&, const Tensor4<double>&);
template void split_channels(const Tensor4<float>&, std::size_t, Tensor4<float>&,
                             Tensor4<float>&);
template void split_channels(const Tensor4<double>&, std::size_t, Tensor4<double>&,
                             Tensor4<double>&);

}  // namespace gprd::nn
