#include "randomx/csv.hpp"

#include <charconv>
#include <cstdio>
#include <ostream>
#include <sstream>

#include "randomx/error.hpp"

namespace randomx {

std::string format_double(double v) {
  char buf[40];
  const int len = std::snprintf(buf, sizeof buf, "%.17g", v);
  return std::string(buf, static_cast<std::size_t>(len));
}

namespace {

bool needs_quotes(std::string_view s) { return s.find_first_of(",\"\n\r") != std::string_view::npos; }

void write_field(std::ostream& out, std::string_view s) {
  if (!needs_quotes(s)) {
    out << s;
    return;
  }
  out << '"';
  for (char c : s) {
    if (c == '"') out << '"';
    out << c;
  }
  out << '"';
}

void write_row(std::ostream& out, const std::vector<std::string>& row) {
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (i) out << ',';
    write_field(out, row[i]);
  }
  out << '\n';
}

[[noreturn]] void parse_fail(std::size_t line, const std::string& what) {
  throw Error(ErrorCode::ParseError, "line " + std::to_string(line) + ": " + what);
}

}  // namespace

void write_csv(std::ostream& out, const CsvTable& table) {
  write_row(out, table.header);
  for (const auto& r : table.rows) write_row(out, r);
}

std::string to_csv(const CsvTable& table) {
  std::ostringstream s;
  write_csv(s, table);
  return s.str();
}

CsvTable parse_csv(std::string_view text) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::size_t> record_lines;
  std::vector<std::string> row;
  std::string field;
  std::size_t line = 1;
  std::size_t row_line = 1;
  std::size_t quote_line = 1;
  bool in_quotes = false;
  bool field_started = false;

  auto end_field = [&] {
    row.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_row = [&] {
    end_field();
    // A line holding nothing at all is skipped.
    if (!(row.size() == 1 && row[0].empty())) {
      records.push_back(std::move(row));
      record_lines.push_back(row_line);
    }
    row.clear();
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line;
        field += c;
      }
      continue;
    }
    switch (c) {
      case '"':
        if (field_started) parse_fail(line, "quote inside an unquoted field");
        in_quotes = true;
        quote_line = line;
        field_started = true;
        break;
      case ',':
        end_field();
        break;
      case '\r':
        if (i + 1 < text.size() && text[i + 1] == '\n') break;
        parse_fail(line, "bare carriage return");
      case '\n':
        end_row();
        ++line;
        row_line = line;
        break;
      default:
        field += c;
        field_started = true;
    }
  }
  if (in_quotes) parse_fail(quote_line, "unterminated quoted field");
  if (field_started || !row.empty()) end_row();

  CsvTable table;
  if (records.empty()) return table;
  table.header = std::move(records.front());
  for (std::size_t r = 1; r < records.size(); ++r) {
    if (records[r].size() != table.header.size())
      parse_fail(record_lines[r], "expected " + std::to_string(table.header.size()) + " fields, found " +
                                      std::to_string(records[r].size()));
    table.rows.push_back(std::move(records[r]));
  }
  return table;
}

NumericTable parse_numeric_csv(std::string_view text) {
  const CsvTable raw = parse_csv(text);
  if (raw.header.empty()) throw Error(ErrorCode::ParseError, "line 1: missing header");
  NumericTable out;
  out.header = raw.header;
  out.values = Matrix(raw.rows.size(), raw.header.size());
  for (std::size_t r = 0; r < raw.rows.size(); ++r) {
    for (std::size_t c = 0; c < raw.header.size(); ++c) {
      const std::string& s = raw.rows[r][c];
      double v = 0.0;
      const char* first = s.data();
      const char* last = s.data() + s.size();
      while (first < last && *first == ' ') ++first;
      while (last > first && last[-1] == ' ') --last;
      const auto res = std::from_chars(first, last, v);
      if (first == last || res.ec != std::errc{} || res.ptr != last)
        throw Error(ErrorCode::ParseError, "data row " + std::to_string(r + 1) + ", column '" + raw.header[c] +
                                               "': not a number: '" + s + "'");
      out.values(r, c) = v;
    }
  }
  return out;
}

}  // namespace randomx
