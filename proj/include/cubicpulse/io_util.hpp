#pragma once

#include <filesystem>
#include <span>
#include <string_view>

namespace cubicpulse {

/// Writes to `<path>.tmp` and renames over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);
void write_file_atomic(const std::filesystem::path& path, std::span<const unsigned char> bytes);

std::string read_text_file(const std::filesystem::path& path);

/// Shortest decimal text that round-trips the double.
std::string format_double(double v);

} // namespace cubicpulse
