// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace csta {

/// Minimal CSV support: comma separators, double-quote quoting for fields
/// containing commas, quotes or newlines. Every file the tools emit starts
/// with a header row and parses back through read_csv.
using CsvRow = std::vector<std::string>;

std::string csv_escape(const std::string& field);
std::string csv_line(const CsvRow& row);

std::vector<CsvRow> parse_csv(const std::string& text);
std::vector<CsvRow> read_csv(const std::filesystem::path& path);

/// Writes rows atomically (temp file plus rename).
void write_csv(const std::filesystem::path& path, const std::vector<CsvRow>& rows);

} // namespace csta
