#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace gprd::nn {

struct Shape4 {
  std::size_t n = 1;
  std::size_t c = 1;
  std::size_t h = 1;
  std::size_t w = 1;

  std::size_t count() const noexcept { return n * c * h * w; }
  std::size_t plane() const noexcept { return h * w; }
  friend bool operator==(const Shape4&, const Shape4&) = default;
};

std::string to_string(const Shape4& s);

/// Dense NCHW tensor. double is used for gradient checks, float for training.
template <typename T>
class Tensor4 {
 public:
  Tensor4() = default;
  explicit Tensor4(Shape4 shape, T fill = T{0});
  Tensor4(Shape4 shape, std::vector<T> values);

  const Shape4& shape() const noexcept { return shape_; }
  std::size_t size() const noexcept { return values_.size(); }
  bool empty() const noexcept { return values_.empty(); }

  T* data() noexcept { return values_.data(); }
  const T* data() const noexcept { return values_.data(); }
  std::span<T> values() noexcept { return values_; }
  std::span<const T> values() const noexcept { return values_; }

  T& at(std::size_t n, std::size_t c, std::size_t h, std::size_t w) noexcept {
    return values_[((n * shape_.c + c) * shape_.h + h) * shape_.w + w];
  }
  T at(std::size_t n, std::size_t c, std::size_t h, std::size_t w) const noexcept {
    return values_[((n * shape_.c + c) * shape_.h + h) * shape_.w + w];
  }

  /// Pointer to channel c of sample n.
  T* channel(std::size_t n, std::size_t c) noexcept {
    return values_.data() + (n * shape_.c + c) * shape_.plane();
  }
  const T* channel(std::size_t n, std::size_t c) const noexcept {
    return values_.data() + (n * shape_.c + c) * shape_.plane();
  }

  void fill(T value);
  Tensor4& operator+=(const Tensor4& other);

  /// Throws InvalidArgument if any value is NaN or infinite.
  void require_finite(const char* what) const;

 private:
  Shape4 shape_{};
  std::vector<T> values_;
};

/// Channel-wise concatenation [a, b].
template <typename T>
Tensor4<T> concat_channels(const Tensor4<T>& a, const Tensor4<T>& b);

/// Splits channels [0, first) and [first, C) of x.
template <typename T>
void split_channels(const Tensor4<T>& x, std::size_t first, Tensor4<T>& head,
                    Tensor4<T>& tail);

template <typename To, typename From>
Tensor4<To> tensor_cast(const Tensor4<From>& x) {
  std::vector<To> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = static_cast<To>(x.data()[i]);
  return Tensor4<To>(x.shape(), std::move(out));
}

}  // namespace gprd::nn
