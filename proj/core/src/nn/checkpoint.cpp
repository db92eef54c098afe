#include "gprd/nn/checkpoint.hpp"

#include <bit>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>

#include "gprd/errors.hpp"

namespace gprd::nn {

namespace {

constexpr std::string_view kMagic = "CRN1\n";

void put_f32(std::string& out, float v) {
  const auto bits = std::bit_cast<std::uint32_t>(v);
  for (int b = 0; b < 4; ++b) out.push_back(static_cast<char>((bits >> (8 * b)) & 0xFFu));
}

float get_f32(const char* p) {
  std::uint32_t bits = 0;
  for (int b = 0; b < 4; ++b) {
    bits |= static_cast<std::uint32_t>(static_cast<unsigned char>(p[b])) << (8 * b);
  }
  return std::bit_cast<float>(bits);
}

std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

class Reader {
 public:
  explicit Reader(std::string_view bytes) : bytes_(bytes) {}

  std::size_t offset() const { return pos_; }

  std::string_view line() {
    const auto nl = bytes_.find('\n', pos_);
    if (nl == std::string_view::npos) throw FormatError("checkpoint: unterminated line", pos_);
    const auto out = bytes_.substr(pos_, nl - pos_);
    pos_ = nl + 1;
    return out;
  }

  /// "key value" line with an expected key.
  std::string_view field(std::string_view key) {
    const std::size_t at = pos_;
    const auto l = line();
    const auto sp = l.find(' ');
    if (sp == std::string_view::npos || l.substr(0, sp) != key) {
      throw FormatError("checkpoint: expected field '" + std::string(key) + "'", at);
    }
    return l.substr(sp + 1);
  }

  template <typename V>
  V number(std::string_view text, std::size_t at) {
    V value{};
    auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || p != text.data() + text.size()) {
      throw FormatError("checkpoint: malformed number '" + std::string(text) + "'", at);
    }
    return value;
  }

  const char* take(std::size_t n) {
    if (bytes_.size() - pos_ < n) {
      throw FormatError("checkpoint: truncated payload (need " + std::to_string(n) +
                            " bytes, have " + std::to_string(bytes_.size() - pos_) + ")",
                        pos_);
    }
    const char* p = bytes_.data() + pos_;
    pos_ += n;
    return p;
  }

  bool done() const { return pos_ == bytes_.size(); }

 private:
  std::string_view bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string encode_checkpoint(CRNet<float>& model) {
  const CRNetConfig& cfg = model.config();
  std::string out(kMagic);
  out += "base_width " + std::to_string(cfg.base_width) + "\n";
  out += "depth " + std::to_string(cfg.depth) + "\n";
  out += "rdb_layers " + std::to_string(cfg.rdb_layers) + "\n";
  out += "bn_momentum " + format_double(cfg.bn_momentum) + "\n";
  out += "bn_eps " + format_double(cfg.bn_eps) + "\n";
  ParamSet<float> set = model.parameters();
  out += "groups " + std::to_string(set.params.size() + set.buffers.size()) + "\n";
  auto emit = [&out](const std::string& name, const std::vector<float>& values) {
    out += name + " " + std::to_string(values.size()) + "\n";
    for (float v : values) put_f32(out, v);
  };
  for (const auto* p : set.params) emit(p->name, p->value);
  for (const auto* b : set.buffers) emit(b->name, b->value);
  return out;
}

CRNet<float> decode_checkpoint(std::string_view bytes) {
  if (bytes.substr(0, kMagic.size()) != kMagic) {
    throw FormatError("checkpoint: bad magic (expected CRN1)", 0);
  }
  Reader in(bytes.substr(0));
  in.line();
  CRNetConfig cfg;
  std::size_t at = in.offset();
  cfg.base_width = in.number<std::size_t>(in.field("base_width"), at);
  at = in.offset();
  cfg.depth = in.number<std::size_t>(in.field("depth"), at);
  at = in.offset();
  cfg.rdb_layers = in.number<std::size_t>(in.field("rdb_layers"), at);
  at = in.offset();
  cfg.bn_momentum = in.number<double>(in.field("bn_momentum"), at);
  at = in.offset();
  cfg.bn_eps = in.number<double>(in.field("bn_eps"), at);
  at = in.offset();
  const auto groups = in.number<std::size_t>(in.field("groups"), at);

  CRNet<float> model(cfg);
  ParamSet<float> set = model.parameters();
  std::map<std::string, std::vector<float>*> slots;
  for (auto* p : set.params) slots[p->name] = &p->value;
  for (auto* b : set.buffers) slots[b->name] = &b->value;
  if (groups != slots.size()) {
    throw FormatError("checkpoint: " + std::to_string(groups) + " groups, model expects " +
                          std::to_string(slots.size()),
                      at);
  }
  for (std::size_t g = 0; g < groups; ++g) {
    at = in.offset();
    const auto l = in.line();
    const auto sp = l.rfind(' ');
    if (sp == std::string_view::npos) throw FormatError("checkpoint: malformed group header", at);
    const std::string name(l.substr(0, sp));
    const auto count = in.number<std::size_t>(l.substr(sp + 1), at);
    const auto it = slots.find(name);
    if (it == slots.end()) throw FormatError("checkpoint: unknown group '" + name + "'", at);
    std::vector<float>& dst = *it->second;
    if (dst.size() != count) {
      throw FormatError("checkpoint: group '" + name + "' has " + std::to_string(count) +
                            " values, model expects " + std::to_string(dst.size()),
                        at);
    }
    const char* p = in.take(4 * count);
    for (std::size_t i = 0; i < count; ++i) dst[i] = get_f32(p + 4 * i);
    slots.erase(it);
  }
  if (!in.done()) throw FormatError("checkpoint: trailing bytes", in.offset());
  model.mark_running_stats();
  return model;
}

void save_checkpoint(const std::filesystem::path& path, CRNet<float>& model) {
  const std::string bytes = encode_checkpoint(model);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

CRNet<float> load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open checkpoint " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return decode_checkpoint(buf.str());
}

}  // namespace gprd::nn
