#include "seqdec/csv.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "seqdec/errors.hpp"

namespace seqdec {

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc{}) throw Error("format_double: conversion failed");
  return std::string(buf, ptr);
}

CsvWriter::CsvWriter(std::vector<std::string> header) : header_(std::move(header)) {
  if (header_.empty()) throw Error("CsvWriter: empty header");
}

void CsvWriter::add_row(std::vector<std::string> row) {
  if (row.size() != header_.size())
    throw Error("CsvWriter: row has " + std::to_string(row.size()) + " fields, header has " +
                std::to_string(header_.size()));
  rows_.push_back(std::move(row));
}

namespace {
void append_line(std::string& out, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out += ',';
    out += fields[i];
  }
  out += '\n';
}
} // namespace

std::string CsvWriter::str() const {
  std::string out;
  append_line(out, header_);
  for (const auto& row : rows_) append_line(out, row);
  return out;
}

void CsvWriter::write_file(const std::string& path) const {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("CsvWriter: cannot open " + path);
  f << str();
  if (!f) throw Error("CsvWriter: write failed for " + path);
}

CsvTable read_csv_strict(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error("read_csv_strict: cannot open " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  std::string content = ss.str();
  if (content.empty()) throw Error("read_csv_strict: empty file " + path);
  if (content.back() != '\n') throw Error("read_csv_strict: missing final newline in " + path);

  CsvTable table;
  std::size_t pos = 0;
  bool first = true;
  while (pos < content.size()) {
    std::size_t eol = content.find('\n', pos);
    std::string line = content.substr(pos, eol - pos);
    pos = eol + 1;
    if (line.find('\r') != std::string::npos)
      throw Error("read_csv_strict: CR found in " + path);
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
      std::size_t comma = line.find(',', start);
      fields.push_back(line.substr(start, comma - start));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (first) {
      table.header = std::move(fields);
      if (table.header.empty()) throw Error("read_csv_strict: empty header in " + path);
      first = false;
    } else {
      if (fields.size() != table.header.size())
        throw Error("read_csv_strict: ragged row in " + path);
      table.rows.push_back(std::move(fields));
    }
  }
  return table;
}

} // namespace seqdec
