#include "dicm/csv.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace dicm {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

double parse_cell(const std::string& cell, long line_no) {
  const char* begin = cell.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  while (end != nullptr && (*end == ' ' || *end == '\t' || *end == '\r')) ++end;
  if (end == begin || end == nullptr || *end != '\0') {
    throw DataError("malformed numeric cell '" + cell + "'", line_no);
  }
  if (!std::isfinite(v)) {
    throw DataError("non-finite value '" + cell + "'", line_no);
  }
  return v;
}

}  // namespace

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw DataError("cannot open '" + path.string() + "'");
  }
  std::string line;
  if (!std::getline(in, line)) {
    throw DataError("empty file '" + path.string() + "' (header row required)");
  }
  if (!line.empty() && line.back() == '\r') line.pop_back();
  CsvTable table;
  table.header = split_line(line);
  const auto cols = static_cast<Index>(table.header.size());
  if (cols == 0) {
    throw DataError("empty header in '" + path.string() + "'", 1);
  }

  std::vector<double> body;
  long line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = split_line(line);
    if (static_cast<Index>(cells.size()) != cols) {
      throw DataError("expected " + std::to_string(cols) + " cells, got " +
                          std::to_string(cells.size()),
                      line_no);
    }
    for (const auto& cell : cells) body.push_back(parse_cell(cell, line_no));
  }

  const auto rows = static_cast<Index>(body.size()) / cols;
  table.values.resize(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) {
      table.values(i, j) = body[static_cast<std::size_t>(i * cols + j)];
    }
  }
  return table;
}

void write_csv(const std::filesystem::path& path,
               const std::vector<std::string>& header, const Mat& values) {
  if (values.rows() > 0 &&
      static_cast<Index>(header.size()) != values.cols()) {
    throw ShapeError("write_csv: header width does not match value columns");
  }
  std::ofstream out(path);
  if (!out) {
    throw DataError("cannot write '" + path.string() + "'");
  }
  for (std::size_t j = 0; j < header.size(); ++j) {
    if (j > 0) out << ',';
    out << header[j];
  }
  out << '\n';
  for (Index i = 0; i < values.rows(); ++i) {
    for (Index j = 0; j < values.cols(); ++j) {
      if (j > 0) out << ',';
      out << format_double(values(i, j));
    }
    out << '\n';
  }
}

}  // namespace dicm
