// Copyright 2026 The jointembed Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef JOINTEMBED_IO_HPP
#define JOINTEMBED_IO_HPP

#include <cctype>
#include <filesystem>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "jointembed/error.hpp"
#include "jointembed/graph.hpp"

// CSV tables and key=value text used by the command-line tools.
namespace jointembed::io {

inline std::string trim(std::string_view s) {
  std::size_t a = 0;
  std::size_t b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return std::string(s.substr(a, b - a));
}

inline std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

/// "key=value" lines; '#' starts a comment, blank lines are skipped.
/// Duplicate keys are an error.
inline std::map<std::string, std::string> parse_key_values(std::string_view text, const std::string& source) {
  std::map<std::string, std::string> out;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string body = trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    const std::string where = source + ":" + std::to_string(line_no);
    if (eq == std::string::npos) throw UsageError(where + ": expected key=value");
    std::string key = trim(std::string_view(body).substr(0, eq));
    if (key.empty()) throw UsageError(where + ": empty key");
    if (out.count(key)) throw UsageError(where + ": duplicate key '" + key + "'");
    out.emplace(std::move(key), trim(std::string_view(body).substr(eq + 1)));
  }
  return out;
}

inline double parse_real(const std::string& token, const std::string& what) {
  return jointembed::detail::parse_number<double>(token, what);
}

inline std::vector<double> parse_real_list(const std::string& text, const std::string& what) {
  std::vector<double> out;
  for (const auto& tok : split(text, ',')) out.push_back(parse_real(tok, what));
  return out;
}

inline Vector to_vector(const std::vector<double>& v) {
  return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

/// Dense numeric CSV, one row per line, no header.
inline Matrix parse_matrix_csv(std::string_view text, const std::string& source) {
  std::vector<std::vector<double>> rows;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    rows.push_back(parse_real_list(line, source + ":" + std::to_string(line_no)));
    if (rows.back().size() != rows.front().size()) throw DataError(source + ": ragged CSV rows");
  }
  if (rows.empty()) throw DataError(source + ": empty matrix");
  Matrix out(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j) out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  return out;
}

inline Matrix read_matrix_csv(const std::filesystem::path& path) {
  return parse_matrix_csv(read_text_file(path), path.string());
}

/// Table with a header row and a leading id column, as written by
/// write_table; returns the numeric body without the id column.
inline Matrix read_table_csv(const std::filesystem::path& path) {
  const std::string text = read_text_file(path);
  const auto nl = text.find('\n');
  if (nl == std::string::npos) throw DataError(path.string() + ": missing header");
  const Matrix body = parse_matrix_csv(std::string_view(text).substr(nl + 1), path.string());
  if (body.cols() < 2) throw DataError(path.string() + ": table has no value columns");
  return body.rightCols(body.cols() - 1);
}

/// Header "id_name,prefix1..prefixd", then one row per matrix row.
inline std::string format_table(const Matrix& values, const std::string& id_name, const std::string& prefix) {
  std::string out = id_name;
  for (Eigen::Index j = 0; j < values.cols(); ++j) out += "," + prefix + std::to_string(j + 1);
  out += '\n';
  for (Eigen::Index i = 0; i < values.rows(); ++i) {
    out += std::to_string(i);
    for (Eigen::Index j = 0; j < values.cols(); ++j) out += "," + jointembed::detail::format_double(values(i, j));
    out += '\n';
  }
  return out;
}

/// Ordered key=value report.
class Metrics {
 public:
  void add(const std::string& key, double value) { rows_.emplace_back(key, jointembed::detail::format_double(value)); }
  void add(const std::string& key, std::string value) { rows_.emplace_back(key, std::move(value)); }

  std::string str() const {
    std::string out;
    for (const auto& [k, v] : rows_) out += k + "=" + v + "\n";
    return out;
  }

 private:
  std::vector<std::pair<std::string, std::string>> rows_;
};

}  // namespace jointembed::io

#endif  // JOINTEMBED_IO_HPP
