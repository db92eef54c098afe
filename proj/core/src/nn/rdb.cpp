#include "gprd/nn/rdb.hpp"

#include "gprd/errors.hpp"

namespace gprd::nn {

template <typename T>
ResidualDenseBlock<T>::ResidualDenseBlock(const std::string& name, std::size_t channels)
    : c_(channels), g_(channels / 3) {
  if (g_ == 0) {
    throw InvalidArgument("residual dense block needs at least 3 channels, got " +
                          std::to_string(channels));
  }
  for (std::size_t l = 0; l < kLayers; ++l) {
    convs_[l] = Conv2d<T>(name + ".dense" + std::to_string(l), c_ + l * g_, g_, 3);
  }
  fusion_ = Conv2d<T>(name + ".fusion", fusion_inputs(), c_, 1);
}

template <typename T>
Tensor4<T> ResidualDenseBlock<T>::forward(const Tensor4<T>& f0) {
  if (f0.shape().c != c_) {
    throw InvalidArgument("residual dense block: input has " +
                          std::to_string(f0.shape().c) + " channels, expected " +
                          std::to_string(c_));
  }
  Tensor4<T> stack = f0;
  for (std::size_t l = 0; l < kLayers; ++l) {
    Tensor4<T> f = relus_[l].forward(convs_[l].forward(stack));
    stack = concat_channels(stack, f);
  }
  Tensor4<T> out = fusion_.forward(stack);
  out += f0;
  return out;
}

template <typename T>
Tensor4<T> ResidualDenseBlock<T>::backward(const Tensor4<T>& grad_out) {
  // d(stack) accumulates contributions from the fusion layer and from every
  // later dense layer that consumed a prefix of the stack.
  Tensor4<T> d_stack = fusion_.backward(grad_out);
  for (std::size_t l = kLayers; l-- > 0;) {
    Tensor4<T> head, d_f;
    split_channels(d_stack, c_ + l * g_, head, d_f);
    head += convs_[l].backward(relus_[l].backward(d_f));
    d_stack = std::move(head);
  }
  d_stack += grad_out;
  return d_stack;
}

template <typename T>
void ResidualDenseBlock<T>::collect(ParamSet<T>& set) {
  for (auto& conv : convs_) conv.collect(set);
  fusion_.collect(set);
}

template <typename T>
void ResidualDenseBlock<T>::hash_pattern(PatternHash& h) const {
  for (const auto& r : relus_) r.hash_pattern(h);
}

template class ResidualDenseBlock<float>;
template class ResidualDenseBlock<double>;

}  // namespace gprd::nn
