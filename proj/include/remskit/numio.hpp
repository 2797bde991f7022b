// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace remskit {

// Locale-independent, 17 significant digits; parses back to the same double.
std::string format_double(double v);
bool parse_double(std::string_view s, double& out);

// Splits on commas and/or whitespace, dropping empty fields.
std::vector<std::string_view> split_fields(std::string_view line);
std::string_view trim(std::string_view s);

std::string read_text_file(const std::filesystem::path& path);
// Writes to a sibling temporary file and renames it into place.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

}  // namespace remskit
