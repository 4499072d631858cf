#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace consensus {

/// Shortest decimal text that parses back to exactly `v`.
std::string format_double(double v);

/// Strict full-string parse; returns false on trailing garbage or overflow.
bool parse_double(std::string_view text, double& out);
bool parse_size(std::string_view text, std::size_t& out);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

/// Reads a vector of numbers separated by commas, whitespace or newlines.
/// Lines starting with '#' are ignored.
std::vector<double> parse_vector(const std::string& text);
std::vector<double> load_vector(const std::filesystem::path& path);
std::string format_vector_csv(const std::vector<double>& v);

std::vector<std::string_view> split(std::string_view line, char sep);
std::string_view trim(std::string_view s);

}  // namespace consensus
