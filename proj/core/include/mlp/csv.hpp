#pragma once

#include <string>
#include <variant>
#include <vector>

namespace mlp {

// A single CSV cell: text, a float (printed with 17 significant digits), or
// an exact integer.
using CsvValue = std::variant<std::string, double, long long>;

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<CsvValue>> rows;

  std::size_t columns() const { return header.size(); }

  // Index of a named column, or -1 when absent.
  int column_index(const std::string& name) const;
};

// Round-trip-safe rendering (17 significant digits) used for all
// floating-point output.
std::string format_float(double value);

std::string format_cell(const CsvValue& value);

// Render the table as UTF-8 comma-separated text with a header row and "\n"
// line endings.  Cells containing commas, quotes, or newlines are quoted.
std::string to_csv(const CsvTable& table);

// Render the table while skipping the named columns (used to compare runs
// modulo wall-clock timings).
std::string to_csv_excluding(const CsvTable& table,
                             const std::vector<std::string>& skip);

void write_csv(const std::string& path, const CsvTable& table);

}  // namespace mlp
