#include "sparse_poisson/csv.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

namespace sparse_poisson {

namespace {

std::vector<std::string> split_row(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

std::string strip(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

}  // namespace

int CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return static_cast<int>(i);
  }
  return -1;
}

std::size_t CsvTable::require_column(const std::string& name) const {
  const int idx = column(name);
  if (idx < 0) throw CsvError("missing required column '" + name + "'", 1);
  return static_cast<std::size_t>(idx);
}

CsvTable read_csv(std::istream& in) {
  CsvTable table;
  std::string line;
  long long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string s = strip(line);
    if (s.empty() || s[0] == '#') continue;
    std::vector<std::string> cells = split_row(s);
    for (std::string& c : cells) c = strip(c);
    if (table.header.empty()) {
      table.header = std::move(cells);
      continue;
    }
    if (cells.size() != table.header.size()) {
      throw CsvError("row has " + std::to_string(cells.size()) +
                         " cells, header has " +
                         std::to_string(table.header.size()),
                     line_no);
    }
    table.rows.push_back(std::move(cells));
    table.row_lines.push_back(line_no);
  }
  if (table.header.empty()) throw CsvError("empty input, header required", 1);
  return table;
}

CsvTable read_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CsvError("cannot open '" + path + "'", 0);
  return read_csv(in);
}

long long parse_count(const std::string& cell, long long line) {
  if (cell.empty()) throw CsvError("missing count cell", line);
  char* end = nullptr;
  const long long v = std::strtoll(cell.c_str(), &end, 10);
  if (end == cell.c_str() || *end != '\0' || v < 0) {
    throw CsvError("invalid count '" + cell + "'", line);
  }
  return v;
}

double parse_real(const std::string& cell, long long line) {
  if (cell.empty()) throw CsvError("missing numeric cell", line);
  char* end = nullptr;
  const double v = std::strtod(cell.c_str(), &end);
  if (end == cell.c_str() || *end != '\0') {
    throw CsvError("invalid number '" + cell + "'", line);
  }
  return v;
}

}  // namespace sparse_poisson
