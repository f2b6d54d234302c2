#pragma once

#include <optional>
#include <string>
#include <vector>

namespace pcm {

// Minimal CSV layer for the pipeline's file formats: comma-separated,
// UTF-8, no quoting (fields must not contain commas), empty field = missing.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  // column index by name, -1 if absent
  int column(const std::string& name) const;
};

CsvTable read_csv(const std::string& path);
void write_csv(const std::string& path, const CsvTable& table);

std::vector<std::string> split_csv_line(const std::string& line);

// strict numeric parses; `where` names the row/field in error messages
double parse_double(const std::string& field, const std::string& where);
long parse_long(const std::string& field, const std::string& where);

// shortest round-trip double formatting
std::string format_double(double v);

}  // namespace pcm
