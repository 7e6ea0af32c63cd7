// Copyright 2026 The SynthAudit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "synthaudit/errors.h"
#include "synthaudit/tabular.h"

namespace synthaudit {
namespace {

struct Cell {
  std::string text;
  std::size_t column;  // 1-based character offset of the cell start
};

// Splits CSV text into records of cells. Handles quoted cells with embedded
// commas, doubled quotes and newlines; tolerates CRLF.
std::vector<std::pair<std::size_t, std::vector<Cell>>> Tokenize(
    std::string_view text) {
  std::vector<std::pair<std::size_t, std::vector<Cell>>> records;
  std::vector<Cell> current;
  std::string cell;
  std::size_t line = 1, col = 1, record_line = 1, cell_col = 1;
  bool in_quotes = false, quoted = false, any = false;
  auto end_cell = [&] {
    current.push_back({cell, cell_col});
    cell.clear();
    quoted = false;
  };
  auto end_record = [&] {
    end_cell();
    records.emplace_back(record_line, std::move(current));
    current.clear();
    any = false;
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    char ch = text[i];
    if (in_quotes) {
      if (ch == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          cell += '"';
          ++i;
          ++col;
        } else {
          in_quotes = false;
        }
      } else {
        cell += ch;
        if (ch == '\n') {
          ++line;
          col = 0;
        }
      }
      ++col;
      continue;
    }
    if (ch == '"' && cell.empty() && !quoted) {
      in_quotes = quoted = any = true;
    } else if (ch == ',') {
      end_cell();
      cell_col = col + 1;
      any = true;
    } else if (ch == '\r') {
      // swallowed; the following '\n' ends the record
    } else if (ch == '\n') {
      if (any || !cell.empty()) end_record();
      ++line;
      col = 0;
      record_line = line;
      cell_col = 1;
    } else {
      if (quoted) {
        throw ParseError("characters after closing quote", line, col);
      }
      cell += ch;
      any = true;
    }
    ++col;
  }
  if (in_quotes) throw ParseError("unterminated quoted cell", line, col);
  if (any || !cell.empty()) end_record();
  return records;
}

std::vector<std::string> SplitList(std::string_view s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    std::size_t bar = s.find('|', start);
    out.emplace_back(s.substr(start, bar - start));
    if (bar == std::string_view::npos) break;
    start = bar + 1;
  }
  return out;
}

bool ParseDouble(const std::string& s, double* out) {
  if (s.empty()) return false;
  if (s == "inf" || s == "+inf") {
    *out = std::numeric_limits<double>::infinity();
    return true;
  }
  if (s == "-inf") {
    *out = -std::numeric_limits<double>::infinity();
    return true;
  }
  char* end = nullptr;
  errno = 0;
  *out = std::strtod(s.c_str(), &end);
  return errno == 0 && end == s.c_str() + s.size();
}

struct PendingColumn {
  ColumnSchema schema;
  bool support_from_data = false;
  std::unordered_map<std::string, uint32_t> codes;
};

PendingColumn ParseHeaderCell(const Cell& cell) {
  // Labels inside "(...)" may contain ':'; the kind separator is the last
  // colon before the argument list.
  std::size_t colon = cell.text.rfind(':', cell.text.find('('));
  if (colon == std::string::npos || colon == 0) {
    throw ParseError("header cell '" + cell.text + "' is not name:kind", 1,
                     cell.column);
  }
  std::string name = cell.text.substr(0, colon);
  std::string kind = cell.text.substr(colon + 1);
  std::string args;
  if (std::size_t open = kind.find('('); open != std::string::npos) {
    if (kind.back() != ')') {
      throw ParseError("unbalanced '(' in kind '" + kind + "'", 1,
                       cell.column);
    }
    args = kind.substr(open + 1, kind.size() - open - 2);
    kind = kind.substr(0, open);
  }
  PendingColumn col;
  if (kind == "cat") {
    if (args.empty()) {
      col.schema = ColumnSchema::Categorical(name, {});
      col.support_from_data = true;
    } else {
      col.schema = ColumnSchema::Categorical(name, SplitList(args));
      for (std::size_t i = 0; i < col.schema.support.size(); ++i) {
        col.codes.emplace(col.schema.support[i], static_cast<uint32_t>(i));
      }
    }
  } else if (kind == "num") {
    col.schema = ColumnSchema::Continuous(name);
    if (!args.empty()) {
      auto bounds = SplitList(args);
      if (bounds.size() != 2 || !ParseDouble(bounds[0], &col.schema.min) ||
          !ParseDouble(bounds[1], &col.schema.max)) {
        throw ParseError("numeric bounds must be num(lo|hi)", 1, cell.column);
      }
    }
  } else {
    throw ParseError("unknown kind '" + kind + "' for column '" + name +
                         "' (expected cat or num)",
                     1, cell.column);
  }
  return col;
}

std::string Quote(const std::string& s) {
  bool needs = s.find_first_of(",\"\n\r") != std::string::npos;
  if (!needs) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string FormatNumber(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

Dataset ParseCsv(std::string_view text, std::string provenance) {
  auto records = Tokenize(text);
  if (records.empty()) throw ParseError("missing header row", 1, 0);
  std::vector<PendingColumn> columns;
  for (const Cell& cell : records.front().second) {
    columns.push_back(ParseHeaderCell(cell));
  }
  std::vector<double> values;
  values.reserve((records.size() - 1) * columns.size());
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& [line, cells] = records[r];
    if (cells.size() != columns.size()) {
      throw ParseError("expected " + std::to_string(columns.size()) +
                           " cells, found " + std::to_string(cells.size()),
                       line, 0);
    }
    for (std::size_t c = 0; c < cells.size(); ++c) {
      PendingColumn& col = columns[c];
      const std::string& text_value = cells[c].text;
      if (col.schema.categorical()) {
        auto it = col.codes.find(text_value);
        if (it == col.codes.end()) {
          if (!col.support_from_data) {
            throw ParseError("value '" + text_value +
                                 "' is not in the support of column '" +
                                 col.schema.name + "'",
                             line, cells[c].column);
          }
          uint32_t code = static_cast<uint32_t>(col.schema.support.size());
          col.schema.support.push_back(text_value);
          it = col.codes.emplace(text_value, code).first;
        }
        values.push_back(it->second);
      } else {
        double v;
        if (!ParseDouble(text_value, &v) || !std::isfinite(v)) {
          throw ParseError("'" + text_value + "' is not a number", line,
                           cells[c].column);
        }
        if (v < col.schema.min || v > col.schema.max) {
          throw ParseError("value " + text_value +
                               " outside the bounds of column '" +
                               col.schema.name + "'",
                           line, cells[c].column);
        }
        values.push_back(v);
      }
    }
  }
  Schema schema;
  for (PendingColumn& col : columns) {
    if (col.schema.categorical() && col.schema.support.empty()) {
      // No rows and no declared support: keep the column valid.
      col.schema.support.push_back("");
    }
    schema.push_back(std::move(col.schema));
  }
  try {
    return Dataset(std::move(schema), std::move(values), std::move(provenance));
  } catch (const InvalidArgument& e) {
    throw ParseError(e.what(), 1, 0);
  }
}

std::string FormatCsv(const Dataset& ds) {
  std::string out;
  const Schema& schema = ds.schema();
  for (std::size_t c = 0; c < schema.size(); ++c) {
    if (c > 0) out += ',';
    const ColumnSchema& col = schema[c];
    if (col.categorical()) {
      std::string list;
      for (std::size_t i = 0; i < col.support.size(); ++i) {
        if (i > 0) list += '|';
        list += col.support[i];
      }
      out += Quote(col.name + ":cat(" + list + ")");
    } else if (std::isinf(col.min) && std::isinf(col.max) && col.min < 0 &&
               col.max > 0) {
      out += Quote(col.name + ":num");
    } else {
      out += Quote(col.name + ":num(" + FormatNumber(col.min) + "|" +
                   FormatNumber(col.max) + ")");
    }
  }
  out += '\n';
  for (std::size_t r = 0; r < ds.num_rows(); ++r) {
    for (std::size_t c = 0; c < schema.size(); ++c) {
      if (c > 0) out += ',';
      double v = ds.at(r, c);
      if (schema[c].categorical()) {
        out += Quote(schema[c].support[static_cast<std::size_t>(v)]);
      } else {
        out += FormatNumber(v);
      }
    }
    out += '\n';
  }
  return out;
}

Dataset ReadCsv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("cannot open '" + path + "' for reading");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return ParseCsv(buffer.str(), path);
}

void WriteCsv(const Dataset& ds, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidArgument("cannot open '" + path + "' for writing");
  out << FormatCsv(ds);
}

}  // namespace synthaudit
