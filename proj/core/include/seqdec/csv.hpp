#pragma once

#include <string>
#include <vector>

namespace seqdec {

/// Shortest decimal representation that round-trips to the same double.
/// Integral values print without a trailing ".0" ("3", not "3.0").
std::string format_double(double v);

/// Minimal CSV writer. Fields are written verbatim; callers pass numeric
/// fields through format_double so output is stable across runs.
class CsvWriter {
public:
  explicit CsvWriter(std::vector<std::string> header);

  void add_row(std::vector<std::string> row);

  /// Header line, then one line per row, '\n' separated, newline-terminated.
  std::string str() const;

  void write_file(const std::string& path) const;

  std::size_t columns() const { return header_.size(); }

private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

/// Parsed CSV: header plus data rows, all as strings.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

/// Strict reader for the CSVs this project emits: a header row is required,
/// every row must have the same column count as the header, and the file
/// must end in a newline. No quoting, fields must not contain commas.
CsvTable read_csv_strict(const std::string& path);

} // namespace seqdec
