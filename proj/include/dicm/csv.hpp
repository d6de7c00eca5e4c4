#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "dicm/linalg.hpp"

namespace dicm {

/// A parsed CSV file: header names plus a numeric body (possibly 0 rows).
struct CsvTable {
  std::vector<std::string> header;
  Mat values;
};

/// Reads a comma-separated file with a mandatory header row. Every body
/// cell must parse as a finite decimal number; violations raise DataError
/// with the 1-based line number.
CsvTable read_csv(const std::filesystem::path& path);

/// Writes a CSV with the given header. Values are printed with %.17g so
/// doubles round-trip exactly.
void write_csv(const std::filesystem::path& path,
               const std::vector<std::string>& header, const Mat& values);

/// %.17g rendering of one double, as used in all file formats.
std::string format_double(double v);

}  // namespace dicm
