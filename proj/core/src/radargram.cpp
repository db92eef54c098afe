#include "gprd/radargram.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "gprd/errors.hpp"

namespace gprd {

Radargram::Radargram(std::size_t height, std::size_t width,
                     std::vector<double> data, double trace_spacing,
                     std::optional<double> time_window, std::string label)
    : height_(height),
      width_(width),
      data_(std::move(data)),
      trace_spacing_(trace_spacing),
      time_window_(time_window),
      label_(std::move(label)) {
  if (height_ == 0 || width_ == 0) {
    throw InvalidArgument("radargram dimensions must be >= 1, got " +
                          std::to_string(height_) + "x" +
                          std::to_string(width_));
  }
  if (data_.size() != height_ * width_) {
    throw InvalidArgument("radargram data length " +
                          std::to_string(data_.size()) + " != " +
                          std::to_string(height_) + "*" +
                          std::to_string(width_));
  }
  for (std::size_t i = 0; i < data_.size(); ++i) {
    if (!std::isfinite(data_[i])) {
      throw InvalidArgument("non-finite amplitude at row " +
                            std::to_string(i / width_) + ", column " +
                            std::to_string(i % width_));
    }
  }
  if (!std::isfinite(trace_spacing_)) {
    throw InvalidArgument("trace spacing must be finite");
  }
  if (time_window_ && !std::isfinite(*time_window_)) {
    throw InvalidArgument("time window must be finite");
  }
  if (label_.find('\n') != std::string::npos) {
    throw InvalidArgument("radargram label must not contain a newline");
  }
}

Radargram Radargram::filled(std::size_t height, std::size_t width,
                            double value, double trace_spacing,
                            std::optional<double> time_window,
                            std::string label) {
  return Radargram(height, width, std::vector<double>(height * width, value),
                   trace_spacing, time_window, std::move(label));
}

double Radargram::min() const {
  return *std::min_element(data_.begin(), data_.end());
}

double Radargram::max() const {
  return *std::max_element(data_.begin(), data_.end());
}

Radargram Radargram::with_data(std::vector<double> data) const {
  return Radargram(height_, width_, std::move(data), trace_spacing_,
                   time_window_, label_);
}

Radargram Radargram::with_label(std::string label) const {
  return Radargram(height_, width_, data_, trace_spacing_, time_window_,
                   std::move(label));
}

DatasetPair::DatasetPair(Radargram raw_scan, Radargram clutter_free_scan,
                         Provenance origin)
    : raw(std::move(raw_scan)),
      clutter_free(std::move(clutter_free_scan)),
      provenance(origin) {
  if (!raw.same_shape(clutter_free)) {
    throw InvalidArgument("pair shapes differ: raw " +
                          std::to_string(raw.height()) + "x" +
                          std::to_string(raw.width()) + ", clutter-free " +
                          std::to_string(clutter_free.height()) + "x" +
                          std::to_string(clutter_free.width()));
  }
}

Radargram normalize_unit(const Radargram& r) {
  const double lo = r.min();
  const double hi = r.max();
  std::vector<double> out(r.size(), 0.0);
  if (hi > lo) {
    const double span = hi - lo;
    const auto in = r.data();
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = (in[i] - lo) / span;
  }
  return r.with_data(std::move(out));
}

Radargram resize_bilinear(const Radargram& r, std::size_t height,
                          std::size_t width) {
  if (height == 0 || width == 0) {
    throw InvalidArgument("resize target must be >= 1x1, got " +
                          std::to_string(height) + "x" + std::to_string(width));
  }
  if (height == r.height() && width == r.width()) return r;

  // Corner-aligned: output sample k maps to k * (n_in - 1) / (n_out - 1).
  auto coord = [](std::size_t k, std::size_t n_in, std::size_t n_out) {
    if (n_out == 1 || n_in == 1) return 0.0;
    return static_cast<double>(k) * static_cast<double>(n_in - 1) /
           static_cast<double>(n_out - 1);
  };

  std::vector<double> out(height * width);
  for (std::size_t i = 0; i < height; ++i) {
    const double y = coord(i, r.height(), height);
    const auto y0 = std::min(static_cast<std::size_t>(y), r.height() - 1);
    const auto y1 = std::min(y0 + 1, r.height() - 1);
    const double fy = y - static_cast<double>(y0);
    for (std::size_t j = 0; j < width; ++j) {
      const double x = coord(j, r.width(), width);
      const auto x0 = std::min(static_cast<std::size_t>(x), r.width() - 1);
      const auto x1 = std::min(x0 + 1, r.width() - 1);
      const double fx = x - static_cast<double>(x0);
      const double top = (1.0 - fx) * r(y0, x0) + fx * r(y0, x1);
      const double bottom = (1.0 - fx) * r(y1, x0) + fx * r(y1, x1);
      out[i * width + j] = (1.0 - fy) * top + fy * bottom;
    }
  }
  // Trace spacing scales with the horizontal resampling ratio.
  const double spacing =
      width > 1 && r.width() > 1
          ? r.trace_spacing() * static_cast<double>(r.width() - 1) /
                static_cast<double>(width - 1)
          : r.trace_spacing();
  return Radargram(height, width, std::move(out), spacing, r.time_window(),
                   r.label());
}

Radargram crop_window(const Radargram& r, std::size_t start_col,
                      std::size_t width) {
  if (start_col < 1 || width < 1 || start_col - 1 + width > r.width()) {
    throw InvalidArgument("crop window [" + std::to_string(start_col) + ", " +
                          std::to_string(start_col + width - 1) +
                          "] outside columns [1, " + std::to_string(r.width()) +
                          "]");
  }
  std::vector<double> out;
  out.reserve(r.height() * width);
  for (std::size_t i = 0; i < r.height(); ++i) {
    for (std::size_t j = 0; j < width; ++j) {
      out.push_back(r(i, start_col - 1 + j));
    }
  }
  return Radargram(r.height(), width, std::move(out), r.trace_spacing(),
                   r.time_window(), r.label());
}

Radargram prepare(const Radargram& r, std::size_t height, std::size_t width) {
  return normalize_unit(resize_bilinear(r, height, width));
}

std::vector<float> to_float32(const Radargram& r) {
  std::vector<float> out(r.size());
  std::transform(r.data().begin(), r.data().end(), out.begin(),
                 [](double v) { return static_cast<float>(v); });
  return out;
}

}  // namespace gprd
