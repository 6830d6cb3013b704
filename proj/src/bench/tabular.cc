/*
 * Copyright 2026 The lazypi Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>

#include <fmt/format.h>

#include "bench/data.h"
#include "common/error.h"

namespace lazypi {
namespace {

std::string Trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

// Empty cells parse as NaN (missing). Returns false for non-numeric text.
bool ParseCell(const std::string& raw, double& value) {
  const std::string cell = Trim(raw);
  if (cell.empty()) {
    value = std::numeric_limits<double>::quiet_NaN();
    return true;
  }
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  if (*first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, value);
  return ec == std::errc() && ptr == last;
}

}  // namespace

std::string TransformName(ResponseTransform transform) {
  return transform == ResponseTransform::kLog1p ? "log1p" : "identity";
}

ResponseTransform ParseTransform(const std::string& name) {
  if (name == "identity") return ResponseTransform::kIdentity;
  if (name == "log1p") return ResponseTransform::kLog1p;
  throw InvalidArgument("unknown response transform '" + name + "'");
}

std::vector<std::vector<std::string>> ParseCsv(std::istream& in) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;
  char c;
  auto end_record = [&] {
    record.push_back(std::move(field));
    field.clear();
    // A lone empty field is a blank line.
    if (!(record.size() == 1 && record[0].empty())) {
      records.push_back(std::move(record));
    }
    record.clear();
    field_started = false;
  };
  while (in.get(c)) {
    if (in_quotes) {
      if (c == '"') {
        if (in.peek() == '"') {
          in.get(c);
          field.push_back('"');
        } else {
          in_quotes = false;
        }
      } else {
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        in_quotes = true;
        field_started = true;
        break;
      case ',':
        record.push_back(std::move(field));
        field.clear();
        field_started = true;
        break;
      case '\r':
        if (in.peek() == '\n') in.get(c);
        end_record();
        break;
      case '\n':
        end_record();
        break;
      default:
        field.push_back(c);
        field_started = true;
    }
  }
  if (in_quotes) throw ParseError("unterminated quoted field in CSV");
  if (field_started || !record.empty() || !field.empty()) end_record();
  return records;
}

TabularData load_tabular(const std::string& path,
                         const std::string& response_column,
                         ResponseTransform transform) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw IoError("cannot open '" + path + "'");
  const auto records = ParseCsv(file);
  if (records.empty()) throw ParseError("'" + path + "' has no header row");

  const auto& header = records.front();
  const std::size_t width = header.size();
  std::size_t response = width;
  std::vector<std::string> names;
  for (std::size_t c = 0; c < width; ++c) {
    if (Trim(header[c]) == response_column) {
      response = c;
    } else {
      names.push_back(Trim(header[c]));
    }
  }
  const bool has_response = !response_column.empty();
  if (has_response && response == width) {
    throw InvalidArgument("column '" + response_column + "' not found in '" +
                          path + "'");
  }

  std::vector<std::vector<double>> kept;
  Index dropped = 0;
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& rec = records[r];
    if (rec.size() != width) {
      throw ParseError(fmt::format("{}: row {} has {} fields, header has {}",
                                   path, r, rec.size(), width));
    }
    std::vector<double> row(width);
    bool finite = true;
    for (std::size_t c = 0; c < width; ++c) {
      if (!ParseCell(rec[c], row[c])) {
        throw ParseError(fmt::format("{}: row {}, column '{}': '{}' is not numeric",
                                     path, r, Trim(header[c]), rec[c]));
      }
    }
    if (has_response && transform == ResponseTransform::kLog1p) {
      row[response] = std::log1p(row[response]);
    }
    for (double v : row) finite = finite && std::isfinite(v);
    if (!finite) {
      ++dropped;
      continue;
    }
    kept.push_back(std::move(row));
  }
  if (kept.empty()) throw InvalidArgument("'" + path + "' has no usable rows");

  const Index n = static_cast<Index>(kept.size());
  const Index p = static_cast<Index>(width) - (has_response ? 1 : 0);
  RowMatrix x(n, p);
  Vector y = Vector::Zero(n);
  for (Index i = 0; i < n; ++i) {
    const auto& row = kept[static_cast<std::size_t>(i)];
    Index k = 0;
    for (std::size_t c = 0; c < width; ++c) {
      if (c == response) {
        y(i) = row[c];
      } else {
        x(i, k++) = row[c];
      }
    }
  }
  return TabularData{RegressionDataset(std::move(x), std::move(y)),
                     std::move(names), dropped};
}

void write_dataset_csv(const std::string& path, const RegressionDataset& data) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path + "'");
  std::string line;
  for (Index k = 0; k < data.dim(); ++k) {
    line += fmt::format("x{},", k + 1);
  }
  line += "y\n";
  out << line;
  for (Index i = 0; i < data.size(); ++i) {
    line.clear();
    for (Index k = 0; k < data.dim(); ++k) {
      line += fmt::format("{},", data.features()(i, k));
    }
    line += fmt::format("{}\n", data.responses()(i));
    out << line;
  }
  if (!out) throw IoError("write to '" + path + "' failed");
}

}  // namespace lazypi
