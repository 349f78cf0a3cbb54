#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "ncdirac/config.hpp"
#include "ncdirac/errors.hpp"

namespace ncdirac {

/// Comma-delimited writer with a mandatory header row. Numbers are written
/// with 17 significant digits; NaN cells are left empty.
class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& header) : out_(path), width_(header.size()) {
    if (!out_) throw ParameterError("cannot write '" + path + "'");
    write_row(header);
  }

  void row(const std::vector<double>& values) {
    if (values.size() != width_) throw DimError("CsvWriter: row width does not match header");
    std::string line;
    for (std::size_t k = 0; k < values.size(); ++k) {
      if (k) line += ',';
      if (values[k] == values[k]) line += format_double(values[k]);
    }
    out_ << line << '\n';
  }

 private:
  void write_row(const std::vector<std::string>& cells) {
    std::string line;
    for (std::size_t k = 0; k < cells.size(); ++k) {
      if (k) line += ',';
      line += cells[k];
    }
    out_ << line << '\n';
  }

  std::ofstream out_;
  std::size_t width_;
};

/// Minimal reader for the files CsvWriter produces.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  int column(const std::string& name) const {
    for (std::size_t k = 0; k < header.size(); ++k)
      if (header[k] == name) return static_cast<int>(k);
    return -1;
  }

  /// Values of a numeric column; empty cells are skipped.
  std::vector<double> numbers(const std::string& name) const {
    const int c = column(name);
    if (c < 0) throw ParameterError("csv: missing column '" + name + "'");
    std::vector<double> out;
    for (const auto& r : rows)
      if (static_cast<std::size_t>(c) < r.size() && !r[c].empty()) out.push_back(std::stod(r[c]));
    return out;
  }
};

inline CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParameterError("cannot read '" + path + "'");
  auto split = [](const std::string& line) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
  };
  CsvTable t;
  std::string line;
  if (!std::getline(in, line)) throw ParameterError("csv: '" + path + "' is empty");
  t.header = split(line);
  while (std::getline(in, line))
    if (!line.empty()) t.rows.push_back(split(line));
  return t;
}

}  // namespace ncdirac
