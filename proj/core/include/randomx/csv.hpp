#pragma once

// Minimal RFC 4180 tables: LF line endings, fields quoted only when they
// contain a comma, quote or newline. Numbers are printed with 17 significant
// digits so parsing and re-emitting a table reproduces it byte for byte.

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "randomx/linalg.hpp"

namespace randomx {

std::string format_double(double v);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

void write_csv(std::ostream& out, const CsvTable& table);
std::string to_csv(const CsvTable& table);

/// Throws ParseError naming the 1-based line for ragged rows or bad quoting.
CsvTable parse_csv(std::string_view text);

struct NumericTable {
  std::vector<std::string> header;
  Matrix values;
};

/// A header line followed by rows of numbers.
NumericTable parse_numeric_csv(std::string_view text);

}  // namespace randomx
