// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace xbias::csv {

struct Record {
  std::size_t line = 0;  // 1-based source line
  std::vector<std::string> fields;
};

/// Comma-separated records with surrounding whitespace trimmed. Blank lines
/// and lines starting with '#' are skipped.
std::vector<Record> read(std::istream& in);
std::vector<Record> read_file(const std::filesystem::path& path);

/// Strict decimal parse; throws DomainError naming the line on failure.
double to_double(std::string_view text, std::size_t line);
bool looks_numeric(std::string_view text);

/// Shortest representation that round-trips through strtod.
std::string format_double(double value);
/// Fixed significant-digit representation ("%.*g").
std::string format_double(double value, int significant_digits);

}  // namespace xbias::csv
