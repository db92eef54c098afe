#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace gprd {

/// Default working size of every prepared scan (time samples x traces).
inline constexpr std::size_t kWorkingHeight = 256;
inline constexpr std::size_t kWorkingWidth = 64;

/// A B-scan: rows are time samples, columns are traces (A-scans).
///
/// Values are immutable after construction and always finite. Storage is
/// row-major double precision.
class Radargram {
 public:
  /// Throws InvalidArgument when a dimension is zero, the data length does not
  /// match, or any amplitude is non-finite.
  Radargram(std::size_t height, std::size_t width, std::vector<double> data,
            double trace_spacing = 0.01,
            std::optional<double> time_window = std::nullopt,
            std::string label = {});

  static Radargram filled(std::size_t height, std::size_t width, double value,
                          double trace_spacing = 0.01,
                          std::optional<double> time_window = std::nullopt,
                          std::string label = {});

  std::size_t height() const noexcept { return height_; }
  std::size_t width() const noexcept { return width_; }
  std::size_t size() const noexcept { return data_.size(); }

  double operator()(std::size_t row, std::size_t col) const noexcept {
    return data_[row * width_ + col];
  }
  std::span<const double> data() const noexcept { return data_; }

  double trace_spacing() const noexcept { return trace_spacing_; }
  const std::optional<double>& time_window() const noexcept {
    return time_window_;
  }
  const std::string& label() const noexcept { return label_; }

  double min() const;
  double max() const;

  /// Same metadata, new samples (same shape).
  Radargram with_data(std::vector<double> data) const;
  Radargram with_label(std::string label) const;

  bool same_shape(const Radargram& other) const noexcept {
    return height_ == other.height_ && width_ == other.width_;
  }

  friend bool operator==(const Radargram&, const Radargram&) = default;

 private:
  std::size_t height_;
  std::size_t width_;
  std::vector<double> data_;
  double trace_spacing_;
  std::optional<double> time_window_;
  std::string label_;
};

enum class Provenance { simulated, hybrid };

struct DatasetPair {
  Radargram raw;
  Radargram clutter_free;
  Provenance provenance = Provenance::simulated;

  /// Throws InvalidArgument when raw and clutter_free differ in shape.
  DatasetPair(Radargram raw_scan, Radargram clutter_free_scan,
              Provenance origin = Provenance::simulated);
};

struct Dataset {
  std::vector<DatasetPair> pairs;
  std::uint64_t seed = 0;
};

/// Affine map to [0, 1]. A constant input maps to all zeros.
Radargram normalize_unit(const Radargram& r);

/// Corner-aligned bilinear interpolation to height x width.
Radargram resize_bilinear(const Radargram& r, std::size_t height,
                          std::size_t width);

/// Keeps columns start_col .. start_col + width - 1 (1-based, inclusive).
Radargram crop_window(const Radargram& r, std::size_t start_col,
                      std::size_t width);

/// Resize to the working size, then normalize.
Radargram prepare(const Radargram& r, std::size_t height = kWorkingHeight,
                  std::size_t width = kWorkingWidth);

/// Row-major, rows = time, as produced by the container reader.
std::vector<float> to_float32(const Radargram& r);

// Container format: one text header line
//   GPRB1 <H> <W> <trace_spacing> <time_window|-> <label>\n
// followed by H*W IEEE-754 binary32 little-endian amplitudes, row-major.
// Amplitudes are stored at single precision, so a write/read round trip is
// bit-exact for float-representable data (everything the reader returns).

void write_radargram(const std::filesystem::path& path, const Radargram& r);
Radargram read_radargram(const std::filesystem::path& path);

std::string encode_radargram(const Radargram& r);
/// Throws FormatError on bad magic, malformed header, truncated or excess
/// payload, or non-finite samples.
Radargram decode_radargram(std::string_view bytes);

}  // namespace gprd
