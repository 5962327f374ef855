#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace eyetrack {

// Minimal RFC-4180-style CSV support: quoted fields, embedded commas,
// quotes and newlines. UTF-8 passes through untouched.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;  // data records, header excluded

  // Column index by header name, -1 if absent.
  int column(const std::string& name) const;
};

CsvTable read_csv(const std::filesystem::path& path);

std::string csv_escape(const std::string& field);
void write_csv_row(std::string& out, const std::vector<std::string>& fields);

// Shortest round-trip decimal form (std::to_chars).
std::string format_double(double v);

// `row` is the 1-based record number (header = record 1) used in messages.
double parse_double(const std::string& cell, std::size_t row, const std::string& column);
long parse_long(const std::string& cell, std::size_t row, const std::string& column);

}  // namespace eyetrack
