#ifndef SPARSE_POISSON_CSV_HPP
#define SPARSE_POISSON_CSV_HPP

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace sparse_poisson {

// Data error in a CSV input; `line` is 1-based and refers to the file.
struct CsvError : std::runtime_error {
  CsvError(const std::string& msg, long long line)
      : std::runtime_error(msg + " (line " + std::to_string(line) + ")"),
        line(line) {}
  long long line;
};

// Comma-separated, header row required, '#' comment lines skipped.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<long long> row_lines;  // source line of each row

  // index of a named column, or -1
  int column(const std::string& name) const;
  // throwing variant
  std::size_t require_column(const std::string& name) const;
};

CsvTable read_csv(std::istream& in);
CsvTable read_csv_file(const std::string& path);

long long parse_count(const std::string& cell, long long line);
double parse_real(const std::string& cell, long long line);

}  // namespace sparse_poisson

#endif
