#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace vri::io {

// Splits one CSV line on commas; fields are trimmed of surrounding
// whitespace. No quoting: none of the pipeline formats need it.
std::vector<std::string_view> split_csv(std::string_view line);

std::optional<double> parse_double(std::string_view s);
std::optional<long long> parse_int(std::string_view s);

// Shortest decimal form that round-trips the double exactly, so every
// emitted file re-reads to identical bits.
std::string format_double(double v);

// Writes content to path + ".tmp" then renames over path.
void write_file_atomic(const std::string& path, const std::string& content);

std::string read_file(const std::string& path);

}  // namespace vri::io
