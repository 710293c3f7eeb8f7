#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace redsense::io {

std::string read_file(const std::filesystem::path& path);
// Writes via a sibling temporary file and rename so readers never see a
// partial artifact.
void write_file(const std::filesystem::path& path, std::string_view contents);

std::string sha256_hex(std::string_view bytes);
std::string sha256_file(const std::filesystem::path& path);

// Shortest representation that round-trips through strtod.
std::string format_double(double value);

// RFC 4180 quoting when the field contains a comma, quote or newline.
std::string csv_field(std::string_view field);
std::string csv_row(const std::vector<std::string>& fields);
// Splits one CSV record (no embedded line breaks) honoring quotes.
std::vector<std::string> parse_csv_line(std::string_view line);

std::string trim(std::string_view s);

}  // namespace redsense::io
