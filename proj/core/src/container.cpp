#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>
#include <sstream>

#include "gprd/errors.hpp"
#include "gprd/radargram.hpp"

namespace gprd {

namespace {

constexpr std::string_view kMagic = "GPRB1";

void append_f32_le(std::string& out, float v) {
  auto bits = std::bit_cast<std::uint32_t>(v);
  for (int b = 0; b < 4; ++b) {
    out.push_back(static_cast<char>((bits >> (8 * b)) & 0xFFu));
  }
}

float read_f32_le(const char* p) {
  std::uint32_t bits = 0;
  for (int b = 0; b < 4; ++b) {
    bits |= static_cast<std::uint32_t>(static_cast<unsigned char>(p[b]))
            << (8 * b);
  }
  return std::bit_cast<float>(bits);
}

std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

template <typename Number>
Number parse_number(std::string_view token, std::uint64_t offset,
                    const char* field) {
  Number value{};
  auto [ptr, ec] =
      std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc{} || ptr != token.data() + token.size()) {
    throw FormatError(std::string("invalid ") + field + " '" +
                          std::string(token) + "'",
                      offset);
  }
  return value;
}

}  // namespace

std::string encode_radargram(const Radargram& r) {
  std::string out;
  out.reserve(64 + r.label().size() + 4 * r.size());
  out += kMagic;
  out += ' ';
  out += std::to_string(r.height());
  out += ' ';
  out += std::to_string(r.width());
  out += ' ';
  out += format_double(r.trace_spacing());
  out += ' ';
  out += r.time_window() ? format_double(*r.time_window()) : std::string("-");
  out += ' ';
  out += r.label();
  out += '\n';
  for (double v : r.data()) {
    if (std::abs(v) > static_cast<double>(std::numeric_limits<float>::max())) {
      throw InvalidArgument("amplitude " + format_double(v) +
                            " exceeds binary32 range");
    }
    append_f32_le(out, static_cast<float>(v));
  }
  return out;
}

Radargram decode_radargram(std::string_view bytes) {
  const auto newline = bytes.find('\n');
  if (newline == std::string_view::npos) {
    throw FormatError("missing header line terminator", bytes.size());
  }
  const std::string_view header = bytes.substr(0, newline);

  // Split off the first five space-separated fields; the label is the rest.
  std::string_view fields[5];
  std::size_t pos = 0;
  for (int f = 0; f < 5; ++f) {
    const auto next = header.find(' ', pos);
    if (next == std::string_view::npos) {
      if (f == 0 && header.substr(0, kMagic.size()) != kMagic) {
        throw FormatError("bad magic '" + std::string(header.substr(0, 5)) +
                              "'",
                          0);
      }
      throw FormatError("header has fewer than 6 fields", pos);
    }
    fields[f] = header.substr(pos, next - pos);
    pos = next + 1;
  }
  if (fields[0] != kMagic) {
    throw FormatError("bad magic '" + std::string(fields[0]) + "'", 0);
  }
  std::uint64_t offset = fields[0].size() + 1;
  const auto height = parse_number<std::size_t>(fields[1], offset, "height");
  offset += fields[1].size() + 1;
  const auto width = parse_number<std::size_t>(fields[2], offset, "width");
  offset += fields[2].size() + 1;
  const auto spacing =
      parse_number<double>(fields[3], offset, "trace spacing");
  offset += fields[3].size() + 1;
  std::optional<double> window;
  if (fields[4] != "-") {
    window = parse_number<double>(fields[4], offset, "time window");
  }
  std::string label(header.substr(pos));

  if (height == 0 || width == 0) {
    throw FormatError("zero dimension in header", fields[0].size() + 1);
  }
  const std::uint64_t payload_start = newline + 1;
  const std::uint64_t count = static_cast<std::uint64_t>(height) * width;
  const std::uint64_t expected = count * 4;
  const std::uint64_t available = bytes.size() - payload_start;
  if (available < expected) {
    throw FormatError("truncated payload: header declares " +
                          std::to_string(count) + " samples, found " +
                          std::to_string(available / 4) + " (" +
                          std::to_string(available) + " bytes)",
                      bytes.size());
  }
  if (available > expected) {
    throw FormatError("trailing bytes after payload",
                      payload_start + expected);
  }

  std::vector<double> data(count);
  const char* p = bytes.data() + payload_start;
  for (std::uint64_t i = 0; i < count; ++i) {
    const float v = read_f32_le(p + 4 * i);
    if (!std::isfinite(v)) {
      throw FormatError("non-finite sample " + std::to_string(i),
                        payload_start + 4 * i);
    }
    data[i] = static_cast<double>(v);
  }
  return Radargram(height, width, std::move(data), spacing, window,
                   std::move(label));
}

void write_radargram(const std::filesystem::path& path, const Radargram& r) {
  const std::string bytes = encode_radargram(r);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

Radargram read_radargram(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::string bytes((std::istreambuf_iterator<char>(in)),
                    std::istreambuf_iterator<char>());
  return decode_radargram(bytes);
}

}  // namespace gprd
