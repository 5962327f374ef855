#include "eyetrack/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "eyetrack/errors.hpp"

namespace eyetrack {

int CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return static_cast<int>(i);
  }
  return -1;
}

namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open file: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

CsvTable read_csv(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  CsvTable table;
  std::vector<std::string> record;
  std::string field;
  bool in_quotes = false;
  bool record_has_content = false;
  std::size_t record_no = 1;

  auto end_field = [&] {
    record.push_back(std::move(field));
    field.clear();
  };
  auto end_record = [&] {
    if (!record_has_content && record.empty()) return;  // skip blank lines
    end_field();
    if (table.header.empty()) {
      table.header = std::move(record);
    } else {
      if (record.size() != table.header.size()) {
        throw ParseError("row " + std::to_string(record_no) + ": expected " +
                         std::to_string(table.header.size()) + " fields, got " +
                         std::to_string(record.size()) + " in " + path.string());
      }
      table.rows.push_back(std::move(record));
    }
    record.clear();
    record_has_content = false;
    ++record_no;
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        in_quotes = true;
        record_has_content = true;
        break;
      case ',':
        end_field();
        record_has_content = true;
        break;
      case '\r':
        break;
      case '\n':
        if (record_has_content || !field.empty() || !record.empty()) end_record();
        break;
      default:
        field.push_back(c);
        record_has_content = true;
    }
  }
  if (in_quotes) throw ParseError("unterminated quoted field in " + path.string());
  if (record_has_content || !field.empty() || !record.empty()) end_record();

  if (table.header.empty()) throw SchemaError("empty CSV file: " + path.string());
  return table;
}

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  out.push_back('"');
  return out;
}

void write_csv_row(std::string& out, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out.push_back(',');
    out += csv_escape(fields[i]);
  }
  out.push_back('\n');
}

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& cell, std::size_t row, const std::string& column) {
  double value = 0.0;
  const char* begin = cell.data();
  const char* end = begin + cell.size();
  auto res = std::from_chars(begin, end, value);
  if (res.ec != std::errc{} || res.ptr != end || cell.empty()) {
    throw ParseError("row " + std::to_string(row) + ": non-numeric value '" + cell +
                     "' in column " + column);
  }
  if (!std::isfinite(value)) {
    throw ParseError("row " + std::to_string(row) + ": non-finite value '" + cell +
                     "' in column " + column);
  }
  return value;
}

long parse_long(const std::string& cell, std::size_t row, const std::string& column) {
  long value = 0;
  const char* begin = cell.data();
  const char* end = begin + cell.size();
  auto res = std::from_chars(begin, end, value);
  if (res.ec != std::errc{} || res.ptr != end || cell.empty()) {
    throw ParseError("row " + std::to_string(row) + ": non-integer value '" + cell +
                     "' in column " + column);
  }
  return value;
}

}  // namespace eyetrack
