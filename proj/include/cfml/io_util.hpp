#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace cfml {

// printf %.<sig>g formatting; used for all CSV numeric output.
std::string format_double(double v, int significant_digits = 17);

// Writes via a temp file in the same directory, then renames into place.
void atomic_write_text(const std::string& path, const std::string& content);

std::string read_text_file(const std::string& path);

// FNV-1a 64 over the file bytes, as "fnv64:<hex>"; used in run manifests.
std::string file_checksum(const std::string& path);
std::string text_checksum(const std::string& text);

std::vector<std::string> split_line(const std::string& line, char sep);

} // namespace cfml
