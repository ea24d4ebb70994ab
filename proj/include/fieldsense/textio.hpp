#pragma once

// Plain-text matrix and index-list files shared by every module.
//
// Matrix file: first non-comment line "<rows> <cols>", then one line per row
// with cols whitespace-separated decimals. Lines starting with '#' are
// ignored. Values are written with 17 significant digits, so a save/load
// round trip is exact.

#include "fieldsense/types.hpp"

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace fieldsense::textio {

Matrix read_matrix(const std::filesystem::path& path);

/// Comment lines are written verbatim after a "# " prefix, before the header.
void write_matrix(const std::filesystem::path& path, const Matrix& data,
                  const std::vector<std::string>& comments = {});

/// One non-negative integer per line.
std::vector<Index> read_index_list(const std::filesystem::path& path);
void write_index_list(const std::filesystem::path& path, const std::vector<Index>& indices);

/// Shortest text that parses back to the same double (or "nan"/"inf").
std::string format_double(double value);

/// Parses a full token as a double; throws Format with the line number.
double parse_double(std::string_view token, std::size_t line, const std::filesystem::path& path);
long long parse_integer(std::string_view token, std::size_t line, const std::filesystem::path& path);

std::vector<std::string_view> split_whitespace(std::string_view line);

/// Reads the whole file as lines; throws Io if it cannot be opened.
std::vector<std::string> read_lines(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& contents);

} // namespace fieldsense::textio
