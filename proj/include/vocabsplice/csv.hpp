#pragma once

// Minimal RFC 4180 reader/writer: comma separated, double-quote quoting,
// doubled quotes inside quoted fields, CRLF or LF records. Quoted fields may
// span lines.

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "vocabsplice/error.hpp"

namespace vocabsplice::csv {

using Row = std::vector<std::string>;

inline std::vector<Row> parse(std::string_view data) {
  std::vector<Row> rows;
  Row row;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;
  std::size_t line = 1;

  auto end_field = [&] {
    row.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_row = [&] {
    const bool blank_line = row.empty() && field.empty() && !field_started;
    end_field();
    if (!blank_line) rows.push_back(std::move(row));
    row.clear();
  };

  for (std::size_t i = 0; i < data.size(); ++i) {
    const char c = data[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < data.size() && data[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line;
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        if (!field.empty()) {
          throw Error("csv: stray quote inside unquoted field on line " + std::to_string(line));
        }
        in_quotes = true;
        field_started = true;
        break;
      case ',':
        end_field();
        field_started = true;
        break;
      case '\r':
        if (i + 1 < data.size() && data[i + 1] == '\n') break;
        field.push_back(c);
        break;
      case '\n':
        end_row();
        ++line;
        break;
      default:
        field.push_back(c);
    }
  }
  if (in_quotes) throw Error("csv: unterminated quoted field at end of input");
  if (field_started || !field.empty() || !row.empty()) end_row();
  return rows;
}

inline std::string quote(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

inline std::string format_row(const Row& row) {
  std::string out;
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (i) out.push_back(',');
    out += quote(row[i]);
  }
  out.push_back('\n');
  return out;
}

/// Parses `data`, checks the first record equals `header` and returns the rest.
inline std::vector<Row> parse_with_header(std::string_view data, const Row& header,
                                          std::string_view what) {
  auto rows = parse(data);
  if (rows.empty() || rows.front() != header) {
    std::string want;
    for (std::size_t i = 0; i < header.size(); ++i) want += (i ? "," : "") + header[i];
    throw Error(std::string(what) + ": expected header '" + want + "'");
  }
  rows.erase(rows.begin());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != header.size()) {
      throw Error(std::string(what) + ": record " + std::to_string(i + 1) + " has " +
                  std::to_string(rows[i].size()) + " fields, expected " +
                  std::to_string(header.size()));
    }
  }
  return rows;
}

}  // namespace vocabsplice::csv
