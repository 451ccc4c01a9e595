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

#ifndef JOINTEMBED_GRAPH_HPP
#define JOINTEMBED_GRAPH_HPP

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "jointembed/error.hpp"

namespace jointembed {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// One stored value of a symmetric matrix, upper triangle (row <= col).
struct Entry {
  std::size_t row = 0;
  std::size_t col = 0;
  double value = 0.0;

  friend bool operator==(const Entry&, const Entry&) = default;
};

enum class Storage { dense, sparse };

struct GraphFlags {
  bool weighted = false;
  bool loops_allowed = false;
};

/**
 * An undirected graph on n vertices held as its symmetric adjacency matrix.
 *
 * Dense storage keeps the full row-major matrix; sparse storage keeps the
 * nonzero upper-triangle entries (diagonal included) sorted by (row, col).
 * Construction validates symmetry, binary entries for unweighted graphs and
 * an empty diagonal when loops are not allowed. Instances are immutable.
 */
class Graph {
 public:
  static Graph dense(Matrix entries, GraphFlags flags = {}) {
    detail::require(entries.rows() > 0 && entries.rows() == entries.cols(),
                    "graph matrix must be square with n >= 1");
    const auto n = static_cast<std::size_t>(entries.rows());
    for (std::size_t s = 0; s < n; ++s) {
      for (std::size_t t = s; t < n; ++t) {
        const double v = entries(s, t);
        detail::require(v == entries(t, s), "graph matrix is not symmetric");
        check_value(s, t, v, flags);
      }
    }
    Graph g(n, flags, Storage::dense);
    g.dense_ = std::move(entries);
    return g;
  }

  /// Builds sparse storage from upper-triangle entries. Entries must be sorted
  /// by (row, col) without repeats; explicit zeros are dropped.
  static Graph sparse(std::size_t n, std::vector<Entry> upper, GraphFlags flags = {}) {
    detail::require(n > 0, "graph must have n >= 1");
    for (std::size_t i = 0; i < upper.size(); ++i) {
      const Entry& e = upper[i];
      detail::require(e.row <= e.col, "sparse entries must satisfy row <= col");
      detail::require(e.col < n, "vertex index out of range");
      if (i > 0) {
        const Entry& p = upper[i - 1];
        detail::require(p.row < e.row || (p.row == e.row && p.col < e.col),
                        "sparse entries must be sorted and unique");
      }
      check_value(e.row, e.col, e.value, flags);
    }
    std::erase_if(upper, [](const Entry& e) { return e.value == 0.0; });
    Graph g(n, flags, Storage::sparse);
    g.upper_ = std::move(upper);
    return g;
  }

  std::size_t size() const noexcept { return n_; }
  Storage storage() const noexcept { return storage_; }
  bool weighted() const noexcept { return flags_.weighted; }
  bool loops_allowed() const noexcept { return flags_.loops_allowed; }
  GraphFlags flags() const noexcept { return flags_; }

  double at(std::size_t s, std::size_t t) const {
    detail::require(s < n_ && t < n_, "vertex index out of range");
    if (storage_ == Storage::dense) return dense_(s, t);
    if (s > t) std::swap(s, t);
    const auto it = std::lower_bound(upper_.begin(), upper_.end(), Entry{s, t, 0.0},
                                     [](const Entry& a, const Entry& b) {
                                       return a.row < b.row || (a.row == b.row && a.col < b.col);
                                     });
    return (it != upper_.end() && it->row == s && it->col == t) ? it->value : 0.0;
  }

  Matrix to_dense() const {
    if (storage_ == Storage::dense) return dense_;
    Matrix out = Matrix::Zero(n_, n_);
    for (const Entry& e : upper_) {
      out(e.row, e.col) = e.value;
      out(e.col, e.row) = e.value;
    }
    return out;
  }

  /// Nonzero upper-triangle entries in (row, col) order.
  std::vector<Entry> upper_entries() const {
    if (storage_ == Storage::sparse) return upper_;
    std::vector<Entry> out;
    for (std::size_t s = 0; s < n_; ++s) {
      for (std::size_t t = s; t < n_; ++t) {
        if (dense_(s, t) != 0.0) out.push_back({s, t, dense_(s, t)});
      }
    }
    return out;
  }

  Graph with_storage(Storage storage) const {
    if (storage == storage_) return *this;
    if (storage == Storage::dense) return Graph::dense(to_dense(), flags_);
    return Graph::sparse(n_, upper_entries(), flags_);
  }

  /// y = A v without size checks; y must already have length n.
  void multiply(const Vector& v, Vector& y) const {
    if (storage_ == Storage::dense) {
      y.noalias() = dense_.selfadjointView<Eigen::Upper>() * v;
      return;
    }
    y.setZero();
    for (const Entry& e : upper_) {
      y[e.row] += e.value * v[e.col];
      if (e.row != e.col) y[e.col] += e.value * v[e.row];
    }
  }

  double squared_norm() const {
    if (storage_ == Storage::dense) return dense_.squaredNorm();
    double total = 0.0;
    for (const Entry& e : upper_) {
      total += (e.row == e.col ? 1.0 : 2.0) * e.value * e.value;
    }
    return total;
  }

 private:
  Graph(std::size_t n, GraphFlags flags, Storage storage) : n_(n), flags_(flags), storage_(storage) {}

  static void check_value(std::size_t s, std::size_t t, double v, GraphFlags flags) {
    detail::require(std::isfinite(v), "graph entries must be finite");
    if (!flags.weighted) {
      detail::require(v == 0.0 || v == 1.0, "unweighted graph entries must be 0 or 1");
    }
    if (!flags.loops_allowed && s == t) {
      detail::require(v == 0.0, "self loop present but loops are not allowed");
    }
  }

  std::size_t n_ = 0;
  GraphFlags flags_;
  Storage storage_ = Storage::dense;
  Matrix dense_;
  std::vector<Entry> upper_;
};

/// A . v. Touches only stored nonzeros for sparse graphs.
inline Vector matvec(const Graph& g, const Vector& v) {
  detail::require(static_cast<std::size_t>(v.size()) == g.size(), "matvec: dimension mismatch");
  Vector y(v.size());
  g.multiply(v, y);
  return y;
}

/// h' A h, computed as a matvec followed by a dot product.
inline double quadratic_form(const Graph& g, const Vector& h) { return h.dot(matvec(g, h)); }

/// Squared Frobenius norm over the full matrix, diagonal included.
inline double frobenius_norm_sq(const Graph& g) { return g.squared_norm(); }

// ---------------------------------------------------------------------------
// Edge-list text format
//
//   n e weighted loops
//   u v [w]        (e lines, 0-indexed, u <= v)

namespace detail {

inline std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

template <typename T>
T parse_number(std::string_view token, const std::string& what) {
  T value{};
  const auto* end = token.data() + token.size();
  const auto [ptr, ec] = std::from_chars(token.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    throw DataError(what + ": cannot parse '" + std::string(token) + "'");
  }
  return value;
}

inline bool parse_flag(std::string_view token, const std::string& what) {
  const auto v = parse_number<int>(token, what);
  if (v != 0 && v != 1) throw DataError(what + " must be 0 or 1");
  return v == 1;
}

inline std::string format_double(double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, ptr);
}

}  // namespace detail

inline Graph parse_graph(std::string_view text) {
  std::vector<std::string_view> lines;
  {
    std::size_t start = 0;
    while (start <= text.size()) {
      std::size_t end = text.find('\n', start);
      if (end == std::string_view::npos) end = text.size();
      lines.push_back(text.substr(start, end - start));
      start = end + 1;
    }
  }
  std::erase_if(lines, [](std::string_view l) { return detail::split_ws(l).empty(); });
  if (lines.empty()) throw DataError("malformed header: empty document");

  const auto header = detail::split_ws(lines[0]);
  if (header.size() != 4) throw DataError("malformed header: expected 'n e weighted loops'");
  const auto n = detail::parse_number<std::size_t>(header[0], "malformed header n");
  const auto e = detail::parse_number<std::size_t>(header[1], "malformed header e");
  GraphFlags flags;
  flags.weighted = detail::parse_flag(header[2], "malformed header weighted flag");
  flags.loops_allowed = detail::parse_flag(header[3], "malformed header loops flag");
  if (n == 0) throw DataError("malformed header: n must be positive");
  if (lines.size() - 1 != e) {
    throw DataError("malformed document: header declares " + std::to_string(e) + " edges, found " +
                    std::to_string(lines.size() - 1));
  }

  std::vector<Entry> entries;
  entries.reserve(e);
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto tok = detail::split_ws(lines[i]);
    const std::string where = "edge line " + std::to_string(i);
    if (!flags.weighted && tok.size() == 3) throw DataError(where + ": weight given for unweighted graph");
    if (tok.size() != (flags.weighted ? 3u : 2u)) throw DataError(where + ": wrong field count");
    const auto u = detail::parse_number<std::size_t>(tok[0], where);
    const auto v = detail::parse_number<std::size_t>(tok[1], where);
    if (u >= n || v >= n) throw DataError(where + ": index out of range");
    if (u > v) throw DataError(where + ": u > v");
    const double w = flags.weighted ? detail::parse_number<double>(tok[2], where) : 1.0;
    entries.push_back({u, v, w});
  }
  std::stable_sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    return a.row < b.row || (a.row == b.row && a.col < b.col);
  });
  for (std::size_t i = 1; i < entries.size(); ++i) {
    if (entries[i].row == entries[i - 1].row && entries[i].col == entries[i - 1].col) {
      throw DataError("duplicate edge " + std::to_string(entries[i].row) + " " +
                      std::to_string(entries[i].col));
    }
  }
  return Graph::sparse(n, std::move(entries), flags);
}

inline std::string serialize_graph(const Graph& g) {
  const auto entries = g.upper_entries();
  std::string out = std::to_string(g.size()) + ' ' + std::to_string(entries.size()) + ' ' +
                    (g.weighted() ? '1' : '0') + ' ' + (g.loops_allowed() ? '1' : '0') + '\n';
  for (const Entry& e : entries) {
    out += std::to_string(e.row);
    out += ' ';
    out += std::to_string(e.col);
    if (g.weighted()) {
      out += ' ';
      out += detail::format_double(e.value);
    }
    out += '\n';
  }
  return out;
}

inline std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw DataError("write failed for " + path.string());
}

inline Graph read_graph_file(const std::filesystem::path& path) {
  try {
    return parse_graph(read_text_file(path));
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------

/**
 * m vertex-aligned graphs with optional class labels (1..K) and optional
 * real responses.
 */
class GraphSet {
 public:
  explicit GraphSet(std::vector<Graph> graphs, std::optional<std::vector<int>> labels = std::nullopt,
                    std::optional<std::vector<double>> responses = std::nullopt)
      : graphs_(std::move(graphs)), labels_(std::move(labels)), responses_(std::move(responses)) {
    detail::require(!graphs_.empty(), "graph set must contain at least one graph");
    const std::size_t n = graphs_.front().size();
    for (const Graph& g : graphs_) {
      detail::require(g.size() == n, "all graphs in a set must share the same vertex count");
    }
    if (labels_) {
      detail::require(labels_->size() == graphs_.size(), "label count must equal graph count");
      for (int y : *labels_) detail::require(y >= 1, "class labels must be in 1..K");
    }
    if (responses_) {
      detail::require(responses_->size() == graphs_.size(), "response count must equal graph count");
      for (double r : *responses_) detail::require(std::isfinite(r), "responses must be finite");
    }
  }

  std::size_t size() const noexcept { return graphs_.size(); }
  std::size_t vertex_count() const noexcept { return graphs_.front().size(); }
  const Graph& operator[](std::size_t i) const { return graphs_[i]; }
  const std::vector<Graph>& graphs() const noexcept { return graphs_; }
  const std::optional<std::vector<int>>& labels() const noexcept { return labels_; }
  const std::optional<std::vector<double>>& responses() const noexcept { return responses_; }

  int class_count() const {
    if (!labels_) return 0;
    return *std::max_element(labels_->begin(), labels_->end());
  }

  GraphSet with_storage(Storage storage) const {
    std::vector<Graph> converted;
    converted.reserve(graphs_.size());
    for (const Graph& g : graphs_) converted.push_back(g.with_storage(storage));
    return GraphSet(std::move(converted), labels_, responses_);
  }

  GraphSet with_labels(std::vector<int> labels) const { return GraphSet(graphs_, std::move(labels), responses_); }

  /// The first `count` graphs (with their labels and responses).
  GraphSet prefix(std::size_t count) const {
    detail::require(count >= 1 && count <= graphs_.size(), "prefix length out of range");
    std::vector<Graph> g(graphs_.begin(), graphs_.begin() + static_cast<std::ptrdiff_t>(count));
    std::optional<std::vector<int>> y;
    if (labels_) y.emplace(labels_->begin(), labels_->begin() + static_cast<std::ptrdiff_t>(count));
    std::optional<std::vector<double>> r;
    if (responses_) r.emplace(responses_->begin(), responses_->begin() + static_cast<std::ptrdiff_t>(count));
    return GraphSet(std::move(g), std::move(y), std::move(r));
  }

 private:
  std::vector<Graph> graphs_;
  std::optional<std::vector<int>> labels_;
  std::optional<std::vector<double>> responses_;
};

/// (1/m) sum_i A_i as a weighted graph with loops allowed.
inline Graph mean_adjacency(const GraphSet& gs) {
  const std::size_t n = gs.vertex_count();
  const double scale = 1.0 / static_cast<double>(gs.size());
  if (n <= 1024) {
    Matrix sum = Matrix::Zero(n, n);
    for (const Graph& g : gs.graphs()) {
      for (const Entry& e : g.upper_entries()) {
        sum(e.row, e.col) += e.value;
        if (e.row != e.col) sum(e.col, e.row) += e.value;
      }
    }
    return Graph::dense(sum * scale, {true, true});
  }
  std::vector<Entry> all;
  for (const Graph& g : gs.graphs()) {
    auto entries = g.upper_entries();
    all.insert(all.end(), entries.begin(), entries.end());
  }
  std::stable_sort(all.begin(), all.end(), [](const Entry& a, const Entry& b) {
    return a.row < b.row || (a.row == b.row && a.col < b.col);
  });
  std::vector<Entry> merged;
  for (const Entry& e : all) {
    if (!merged.empty() && merged.back().row == e.row && merged.back().col == e.col) {
      merged.back().value += e.value;
    } else {
      merged.push_back(e);
    }
  }
  for (Entry& e : merged) e.value *= scale;
  return Graph::sparse(n, std::move(merged), {true, true});
}

// ---------------------------------------------------------------------------
// Manifest: one line per graph, "path<TAB>label<TAB>response"; label and
// response may be empty. Relative paths resolve against the manifest folder.

inline GraphSet read_manifest(const std::filesystem::path& manifest) {
  const std::string text = read_text_file(manifest);
  const auto base = manifest.parent_path();
  std::vector<Graph> graphs;
  std::vector<std::optional<int>> labels;
  std::vector<std::optional<double>> responses;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
      const auto tab = line.find('\t', start);
      fields.push_back(line.substr(start, tab == std::string::npos ? std::string::npos : tab - start));
      if (tab == std::string::npos) break;
      start = tab + 1;
    }
    const std::string where = manifest.string() + ":" + std::to_string(line_no);
    if (fields.size() > 3 || fields[0].empty()) throw DataError(where + ": malformed manifest line");
    std::filesystem::path p = fields[0];
    if (p.is_relative()) p = base / p;
    graphs.push_back(read_graph_file(p));
    labels.push_back(fields.size() > 1 && !fields[1].empty()
                         ? std::optional<int>(detail::parse_number<int>(fields[1], where + " label"))
                         : std::nullopt);
    responses.push_back(fields.size() > 2 && !fields[2].empty()
                            ? std::optional<double>(detail::parse_number<double>(fields[2], where + " response"))
                            : std::nullopt);
  }
  if (graphs.empty()) throw DataError(manifest.string() + ": manifest lists no graphs");

  auto collect = [&](const auto& column, const char* what) {
    using T = typename std::decay_t<decltype(column)>::value_type::value_type;
    const auto present = std::count_if(column.begin(), column.end(), [](const auto& v) { return v.has_value(); });
    if (present == 0) return std::optional<std::vector<T>>();
    if (static_cast<std::size_t>(present) != column.size()) {
      throw DataError(manifest.string() + ": " + what + " given for some graphs but not all");
    }
    std::vector<T> out;
    for (const auto& v : column) out.push_back(*v);
    return std::optional<std::vector<T>>(std::move(out));
  };
  return GraphSet(std::move(graphs), collect(labels, "labels"), collect(responses, "responses"));
}

}  // namespace jointembed

#endif  // JOINTEMBED_GRAPH_HPP
