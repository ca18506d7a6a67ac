#include "mlp/csv.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace mlp {

int CsvTable::column_index(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return static_cast<int>(i);
  }
  return -1;
}

std::string format_float(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

namespace {

std::string quote_if_needed(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  out += '"';
  return out;
}

}  // namespace

std::string format_cell(const CsvValue& value) {
  if (const auto* s = std::get_if<std::string>(&value)) return quote_if_needed(*s);
  if (const auto* d = std::get_if<double>(&value)) return format_float(*d);
  return std::to_string(std::get<long long>(value));
}

namespace {

std::string render(const CsvTable& table, const std::vector<bool>& keep) {
  std::string out;
  bool first = true;
  for (std::size_t i = 0; i < table.header.size(); ++i) {
    if (!keep[i]) continue;
    if (!first) out += ',';
    out += quote_if_needed(table.header[i]);
    first = false;
  }
  out += '\n';
  for (const auto& row : table.rows) {
    if (row.size() != table.header.size()) {
      throw std::invalid_argument("csv row width does not match header");
    }
    first = true;
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (!keep[i]) continue;
      if (!first) out += ',';
      out += format_cell(row[i]);
      first = false;
    }
    out += '\n';
  }
  return out;
}

}  // namespace

std::string to_csv(const CsvTable& table) {
  return render(table, std::vector<bool>(table.header.size(), true));
}

std::string to_csv_excluding(const CsvTable& table,
                             const std::vector<std::string>& skip) {
  std::vector<bool> keep(table.header.size(), true);
  for (const auto& name : skip) {
    int idx = table.column_index(name);
    if (idx >= 0) keep[static_cast<std::size_t>(idx)] = false;
  }
  return render(table, keep);
}

void write_csv(const std::string& path, const CsvTable& table) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << to_csv(table);
  if (!out) throw std::runtime_error("failed writing " + path);
}

}  // namespace mlp
