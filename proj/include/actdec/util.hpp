#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace actdec {

// Shortest decimal representation that round-trips the exact double.
std::string format_double(double value);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view content);

// FNV-1a 64-bit content digest (manifest provenance, not security).
std::uint64_t fnv1a64(std::string_view data);

}  // namespace actdec
