#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "gprd/radargram.hpp"

namespace gprd::cli {

/// Runs one command line (without the program name). Returns the process exit
/// code: 0 when every requested artifact was written, 2 for usage errors,
/// 1 for runtime failures.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// 8-bit binary PGM of normalize_unit(r): pixel = round(255 * value).
void write_heatmap(const std::filesystem::path& path, const Radargram& r);
std::vector<unsigned char> heatmap_pixels(const Radargram& r);

}  // namespace gprd::cli
