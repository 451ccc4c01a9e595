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

#ifndef JOINTEMBED_TESTS_SUPPORT_HPP
#define JOINTEMBED_TESTS_SUPPORT_HPP

#include <cstdint>
#include <vector>

#include "jointembed/embed.hpp"
#include "jointembed/graph.hpp"
#include "jointembed/rng.hpp"

namespace jointembed::testing {

inline Matrix random_symmetric(std::size_t n, std::uint64_t seed) {
  rng::Stream s(seed);
  Matrix a(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) a(i, j) = a(j, i) = s.uniform(-1.0, 1.0);
  return a;
}

inline Graph random_binary(std::size_t n, double p, bool loops, std::uint64_t seed) {
  rng::Stream s(seed);
  std::vector<Entry> e;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = loops ? i : i + 1; j < n; ++j)
      if (s.uniform() < p) e.push_back({i, j, 1.0});
  return Graph::sparse(n, std::move(e), {false, loops});
}

inline GraphSet random_weighted_set(std::size_t m, std::size_t n, std::uint64_t seed) {
  std::vector<Graph> gs;
  for (std::size_t i = 0; i < m; ++i) gs.push_back(Graph::dense(random_symmetric(n, rng::derive(seed, i)), {true, true}));
  return GraphSet(std::move(gs));
}

inline GraphSet random_binary_set(std::size_t m, std::size_t n, double p, std::uint64_t seed) {
  std::vector<Graph> gs;
  for (std::size_t i = 0; i < m; ++i) gs.push_back(random_binary(n, p, true, rng::derive(seed, i)));
  return GraphSet(std::move(gs));
}

inline Vector random_unit(std::size_t n, std::uint64_t seed) {
  rng::Stream s(seed);
  Vector v(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = s.normal();
  return v / v.norm();
}

/// Dense residual R_i = A_i - sum_k L_ik h_k h_k'.
inline Matrix dense_residual(const Graph& a, const Vector& loadings, const Matrix& components) {
  Matrix r = a.to_dense();
  for (Eigen::Index k = 0; k < components.cols(); ++k)
    r -= loadings[k] * components.col(k) * components.col(k).transpose();
  return r;
}

/// Naive double-loop objective.
inline double naive_objective(const GraphSet& gs, const Matrix& loadings, const Matrix& components) {
  double total = 0.0;
  for (std::size_t i = 0; i < gs.size(); ++i) {
    const Matrix r = dense_residual(gs[i], loadings.row(static_cast<Eigen::Index>(i)).transpose(), components);
    for (Eigen::Index s = 0; s < r.rows(); ++s)
      for (Eigen::Index t = 0; t < r.cols(); ++t) total += r(s, t) * r(s, t);
  }
  return total;
}

inline bool monotone(const EmbedResult& res) { return res.max_trace_increase() <= 1e-12; }

}  // namespace jointembed::testing

#endif  // JOINTEMBED_TESTS_SUPPORT_HPP
