#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "gprd/nn/crnet.hpp"

namespace gprd::nn {

// Checkpoint layout:
//   CRN1\n
//   base_width <b>\n depth <d>\n rdb_layers <l>\n bn_momentum <m>\n bn_eps <e>\n
//   groups <G>\n
//   then G times: "<name> <count>\n" followed by count binary32 LE values.
// Groups cover every trainable parameter and batch-norm running statistic.

std::string encode_checkpoint(CRNet<float>& model);
/// Throws FormatError (with byte offset) on malformed input.
CRNet<float> decode_checkpoint(std::string_view bytes);

void save_checkpoint(const std::filesystem::path& path, CRNet<float>& model);
CRNet<float> load_checkpoint(const std::filesystem::path& path);

}  // namespace gprd::nn
