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

#ifndef JOINTEMBED_MODELS_HPP
#define JOINTEMBED_MODELS_HPP

#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "jointembed/error.hpp"
#include "jointembed/graph.hpp"
#include "jointembed/numerics.hpp"
#include "jointembed/parallel.hpp"
#include "jointembed/rng.hpp"

namespace jointembed::models {

// ---------------------------------------------------------------------------
// Loading distributions

/// Finite mixture of point masses: loading `atoms[j]` with probability `weights[j]`.
struct PointMassMixture {
  std::vector<Vector> atoms;
  std::vector<double> weights;
};

/// Independent Uniform(lo[k], hi[k]) coordinates.
struct UniformBox {
  Vector lo;
  Vector hi;
};

/// Graph i receives loadings[i].
struct FixedList {
  std::vector<Vector> loadings;
};

using LoadingDistribution = std::variant<PointMassMixture, UniformBox, FixedList>;

inline std::size_t loading_dimension(const LoadingDistribution& f) {
  return std::visit(
      [](const auto& dist) -> std::size_t {
        using T = std::decay_t<decltype(dist)>;
        if constexpr (std::is_same_v<T, PointMassMixture>) {
          return dist.atoms.empty() ? 0 : static_cast<std::size_t>(dist.atoms.front().size());
        } else if constexpr (std::is_same_v<T, UniformBox>) {
          return static_cast<std::size_t>(dist.lo.size());
        } else {
          return dist.loadings.empty() ? 0 : static_cast<std::size_t>(dist.loadings.front().size());
        }
      },
      f);
}

inline void validate(const LoadingDistribution& f, std::size_t d) {
  std::visit(
      [d](const auto& dist) {
        using T = std::decay_t<decltype(dist)>;
        if constexpr (std::is_same_v<T, PointMassMixture>) {
          detail::require(!dist.atoms.empty() && dist.atoms.size() == dist.weights.size(),
                          "mixture needs one weight per atom");
          double total = 0.0;
          for (std::size_t j = 0; j < dist.atoms.size(); ++j) {
            detail::require(static_cast<std::size_t>(dist.atoms[j].size()) == d, "mixture atom has wrong dimension");
            detail::require(dist.weights[j] > 0.0, "mixture weights must be positive");
            total += dist.weights[j];
          }
          detail::require(std::abs(total - 1.0) <= 1e-12, "mixture weights must sum to 1");
        } else if constexpr (std::is_same_v<T, UniformBox>) {
          detail::require(static_cast<std::size_t>(dist.lo.size()) == d && static_cast<std::size_t>(dist.hi.size()) == d,
                          "uniform box has wrong dimension");
          for (Eigen::Index k = 0; k < dist.lo.size(); ++k) {
            detail::require(dist.lo[k] <= dist.hi[k], "uniform box needs lo <= hi");
          }
        } else {
          detail::require(!dist.loadings.empty(), "fixed loading list is empty");
          for (const auto& l : dist.loadings) {
            detail::require(static_cast<std::size_t>(l.size()) == d, "fixed loading has wrong dimension");
          }
        }
      },
      f);
}

/// Loading of graph i, drawn from its own stream so draws are independent of
/// evaluation order. Also reports the mixture component (0 otherwise).
inline std::pair<Vector, std::size_t> draw_loading(const LoadingDistribution& f, std::uint64_t key, std::size_t i) {
  rng::Stream stream(rng::derive(key, i));
  return std::visit(
      [&](const auto& dist) -> std::pair<Vector, std::size_t> {
        using T = std::decay_t<decltype(dist)>;
        if constexpr (std::is_same_v<T, PointMassMixture>) {
          const double u = stream.uniform();
          double acc = 0.0;
          for (std::size_t j = 0; j < dist.atoms.size(); ++j) {
            acc += dist.weights[j];
            if (u < acc) return {dist.atoms[j], j};
          }
          return {dist.atoms.back(), dist.atoms.size() - 1};
        } else if constexpr (std::is_same_v<T, UniformBox>) {
          Vector l(dist.lo.size());
          for (Eigen::Index k = 0; k < l.size(); ++k) l[k] = stream.uniform(dist.lo[k], dist.hi[k]);
          return {l, 0};
        } else {
          if (i >= dist.loadings.size()) throw DataError("fixed loading list shorter than requested graph count");
          return {dist.loadings[i], i};
        }
      },
      f);
}

// ---------------------------------------------------------------------------

/// d unit vectors h_k (columns of `components`) plus a loading distribution.
struct MregModel {
  Matrix components;  // n x d
  LoadingDistribution loadings;

  std::size_t vertex_count() const { return static_cast<std::size_t>(components.rows()); }
  std::size_t dimension() const { return static_cast<std::size_t>(components.cols()); }

  void validate() const {
    detail::require(components.rows() >= 1 && components.cols() >= 1, "model needs n >= 1 and d >= 1");
    for (Eigen::Index k = 0; k < components.cols(); ++k) {
      detail::require(std::abs(components.col(k).norm() - 1.0) <= 1e-12, "model components must have unit norm");
    }
    const Matrix gram = components.transpose() * components;
    const Matrix squared = gram.cwiseProduct(gram);
    const auto eig = numerics::jacobi_eigen(squared);
    const double hi = eig.values.cwiseAbs().maxCoeff();
    const double lo = eig.values.cwiseAbs().minCoeff();
    detail::require(lo > 0.0 && hi / lo <= 1e10, "rank-one components h_k h_k' are not linearly independent");
    models::validate(loadings, dimension());
  }
};

/// What to do with edge probabilities outside [0, 1].
enum class ProbabilityPolicy { reject, clamp };

/// P = sum_k lambda[k] h_k h_k'. Entries outside [0,1] by more than 1e-12 are
/// rejected (or clamped under ProbabilityPolicy::clamp); smaller excursions are
/// rounding and are snapped into range.
inline Matrix edge_prob_matrix(const MregModel& model, const Vector& lambda,
                               ProbabilityPolicy policy = ProbabilityPolicy::reject) {
  detail::require(static_cast<std::size_t>(lambda.size()) == model.dimension(),
                  "edge_prob_matrix: loading has wrong dimension");
  const Matrix& h = model.components;
  Matrix p = h * lambda.asDiagonal() * h.transpose();
  p = 0.5 * (p + p.transpose()).eval();
  for (Eigen::Index s = 0; s < p.rows(); ++s) {
    for (Eigen::Index t = 0; t < p.cols(); ++t) {
      double& v = p(s, t);
      if (!std::isfinite(v)) throw DataError("edge_prob_matrix: non-finite probability");
      if ((v < -1e-12 || v > 1.0 + 1e-12) && policy == ProbabilityPolicy::reject) {
        throw DataError("invalid parameters: edge probability " + detail::format_double(v) + " at (" +
                        std::to_string(s) + "," + std::to_string(t) + ") outside [0,1]");
      }
      v = std::clamp(v, 0.0, 1.0);
    }
  }
  return p;
}

/// One Bernoulli graph from a probability matrix. Entry (s,t), s <= t, uses
/// counter s*n + t of the graph's stream.
inline Graph bernoulli_graph(const Matrix& p, bool loops, std::uint64_t key) {
  const auto n = static_cast<std::size_t>(p.rows());
  std::vector<Entry> entries;
  for (std::size_t s = 0; s < n; ++s) {
    for (std::size_t t = loops ? s : s + 1; t < n; ++t) {
      if (rng::uniform(key, s * n + t) < p(s, t)) entries.push_back({s, t, 1.0});
    }
  }
  return Graph::sparse(n, std::move(entries), {false, loops});
}

struct MregSample {
  GraphSet graphs;
  std::vector<Vector> lambdas;
  std::vector<std::size_t> components;  // mixture component per graph
};

/**
 * Draws m graphs: lambda_i ~ F, then A_i[s][t] ~ Bernoulli(P_i[s][t]) for
 * s <= t (s < t without loops). Graph i uses stream derive(seed, i) below the
 * edge and loading tags, so output is independent of worker count.
 */
inline MregSample sample_mreg(const MregModel& model, std::size_t m, std::uint64_t seed, bool loops,
                              ProbabilityPolicy policy = ProbabilityPolicy::reject) {
  detail::require(m >= 1, "sample_mreg: m must be >= 1");
  model.validate();
  const std::uint64_t loading_key = rng::derive(seed, rng::Tag::loadings);
  const std::uint64_t edge_key = rng::derive(seed, rng::Tag::edges);
  std::vector<std::pair<Vector, std::size_t>> draws(m);
  for (std::size_t i = 0; i < m; ++i) draws[i] = draw_loading(model.loadings, loading_key, i);

  std::vector<std::optional<Graph>> slots(m);
  parallel::for_each_index(m, [&](std::size_t i) {
    const Matrix p = edge_prob_matrix(model, draws[i].first, policy);
    slots[i].emplace(bernoulli_graph(p, loops, rng::derive(edge_key, i)));
  });
  std::vector<Graph> graphs;
  std::vector<Vector> lambdas;
  std::vector<std::size_t> comps;
  for (std::size_t i = 0; i < m; ++i) {
    graphs.push_back(std::move(*slots[i]));
    lambdas.push_back(draws[i].first);
    comps.push_back(draws[i].second);
  }
  return {GraphSet(std::move(graphs)), std::move(lambdas), std::move(comps)};
}

// ---------------------------------------------------------------------------
// Stochastic block model and random dot product graphs

struct SbmParams {
  /// Either a fixed assignment tau (values 0..K-1) or a block prior pi.
  std::variant<std::vector<std::size_t>, std::vector<double>> membership;
  std::size_t n = 0;  // used with a prior; taken from tau otherwise
  Matrix block_probs;

  std::size_t vertex_count() const {
    if (const auto* tau = std::get_if<std::vector<std::size_t>>(&membership)) return tau->size();
    return n;
  }

  void validate() const {
    const auto k = block_probs.rows();
    detail::require(k >= 1 && block_probs.cols() == k, "SBM block matrix must be square");
    for (Eigen::Index a = 0; a < k; ++a) {
      for (Eigen::Index b = 0; b < k; ++b) {
        const double v = block_probs(a, b);
        detail::require(v >= 0.0 && v <= 1.0, "SBM block probabilities must lie in [0,1]");
        detail::require(v == block_probs(b, a), "SBM block matrix must be symmetric");
      }
    }
    if (const auto* tau = std::get_if<std::vector<std::size_t>>(&membership)) {
      detail::require(!tau->empty(), "SBM assignment is empty");
      for (auto b : *tau) detail::require(b < static_cast<std::size_t>(k), "SBM assignment out of range");
    } else {
      const auto& pi = std::get<std::vector<double>>(membership);
      detail::require(n >= 1, "SBM prior form needs n >= 1");
      detail::require(pi.size() == static_cast<std::size_t>(k), "SBM prior has wrong length");
      double total = 0.0;
      for (double p : pi) {
        detail::require(p >= 0.0, "SBM prior entries must be nonnegative");
        total += p;
      }
      detail::require(std::abs(total - 1.0) <= 1e-12, "SBM prior must sum to 1");
    }
  }
};

struct SbmSample {
  GraphSet graphs;
  std::vector<std::vector<std::size_t>> blocks;  // per graph, per vertex
};

inline SbmSample sample_sbm(const SbmParams& params, std::size_t m, std::uint64_t seed) {
  detail::require(m >= 1, "sample_sbm: m must be >= 1");
  params.validate();
  const std::size_t n = params.vertex_count();
  const std::uint64_t block_key = rng::derive(seed, rng::Tag::blocks);
  const std::uint64_t edge_key = rng::derive(seed, rng::Tag::edges);

  std::vector<std::vector<std::size_t>> blocks(m);
  for (std::size_t i = 0; i < m; ++i) {
    if (const auto* tau = std::get_if<std::vector<std::size_t>>(&params.membership)) {
      blocks[i] = *tau;
    } else {
      const auto& pi = std::get<std::vector<double>>(params.membership);
      rng::Stream stream(rng::derive(block_key, i));
      blocks[i].resize(n);
      for (std::size_t v = 0; v < n; ++v) {
        const double u = stream.uniform();
        double acc = 0.0;
        std::size_t b = pi.size() - 1;
        for (std::size_t j = 0; j < pi.size(); ++j) {
          acc += pi[j];
          if (u < acc) {
            b = j;
            break;
          }
        }
        blocks[i][v] = b;
      }
    }
  }
  std::vector<std::optional<Graph>> slots(m);
  parallel::for_each_index(m, [&](std::size_t i) {
    Matrix p(n, n);
    for (std::size_t s = 0; s < n; ++s)
      for (std::size_t t = 0; t < n; ++t) p(s, t) = params.block_probs(blocks[i][s], blocks[i][t]);
    slots[i].emplace(bernoulli_graph(p, false, rng::derive(edge_key, i)));
  });
  std::vector<Graph> graphs;
  for (auto& g : slots) graphs.push_back(std::move(*g));
  return {GraphSet(std::move(graphs)), std::move(blocks)};
}

struct RdpgParams {
  Matrix positions;  // n x d latent positions

  void validate() const {
    detail::require(positions.rows() >= 1 && positions.cols() >= 1, "RDPG needs n >= 1 and d >= 1");
    const Matrix p = positions * positions.transpose();
    for (Eigen::Index s = 0; s < p.rows(); ++s)
      for (Eigen::Index t = 0; t < p.cols(); ++t)
        detail::require(p(s, t) >= -1e-12 && p(s, t) <= 1.0 + 1e-12, "RDPG inner products must lie in [0,1]");
  }
};

inline GraphSet sample_rdpg(const RdpgParams& params, std::size_t m, std::uint64_t seed) {
  detail::require(m >= 1, "sample_rdpg: m must be >= 1");
  params.validate();
  const Matrix p = (params.positions * params.positions.transpose()).cwiseMax(0.0).cwiseMin(1.0);
  const std::uint64_t edge_key = rng::derive(seed, rng::Tag::edges);
  std::vector<std::optional<Graph>> slots(m);
  parallel::for_each_index(m, [&](std::size_t i) { slots[i].emplace(bernoulli_graph(p, false, rng::derive(edge_key, i))); });
  std::vector<Graph> graphs;
  for (auto& g : slots) graphs.push_back(std::move(*g));
  return GraphSet(std::move(graphs));
}

// ---------------------------------------------------------------------------
// Universal representation: any distribution over loop-allowed binary graphs
// on n vertices is an MREG with d = n(n+1)/2.

/// Number of free entries of a symmetric n x n matrix.
constexpr std::size_t free_entries(std::size_t n) { return n * (n + 1) / 2; }

/// Canonical index of a loop-allowed binary graph: bit j is the j-th
/// upper-triangle entry (diagonal included) in row-major order.
inline std::uint64_t canonical_index(const Graph& g) {
  const std::size_t n = g.size();
  detail::require(free_entries(n) < 64, "canonical_index: graph too large");
  std::uint64_t index = 0;
  std::size_t bit = 0;
  for (std::size_t s = 0; s < n; ++s) {
    for (std::size_t t = s; t < n; ++t, ++bit) {
      const double v = g.at(s, t);
      detail::require(v == 0.0 || v == 1.0, "canonical_index: graph must be binary");
      if (v == 1.0) index |= (1ULL << bit);
    }
  }
  return index;
}

inline Graph graph_from_index(std::size_t n, std::uint64_t index) {
  std::vector<Entry> entries;
  std::size_t bit = 0;
  for (std::size_t s = 0; s < n; ++s)
    for (std::size_t t = s; t < n; ++t, ++bit)
      if (index & (1ULL << bit)) entries.push_back({s, t, 1.0});
  return Graph::sparse(n, std::move(entries), {false, true});
}

/// All 2^(n(n+1)/2) loop-allowed binary graphs in canonical order.
inline std::vector<Graph> enumerate_graphs(std::size_t n) {
  detail::require(n >= 1 && n <= 3, "enumerate_graphs: n must be in 1..3");
  const std::uint64_t count = 1ULL << free_entries(n);
  std::vector<Graph> out;
  out.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) out.push_back(graph_from_index(n, i));
  return out;
}

/// Basis e_1..e_n followed by (e_i + e_j)/sqrt(2) for i < j in lexicographic order.
inline Matrix universal_basis(std::size_t n) {
  Matrix h = Matrix::Zero(n, free_entries(n));
  Eigen::Index k = 0;
  for (std::size_t i = 0; i < n; ++i) h(i, k++) = 1.0;
  const double r = 1.0 / std::sqrt(2.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j, ++k) {
      h(i, k) = r;
      h(j, k) = r;
    }
  }
  return h;
}

/// Coordinates of symmetric A in the basis {h_k h_k'}: solves G lambda = b,
/// G[k][l] = (h_k'h_l)^2, b[k] = h_k' A h_k.
inline Vector rank_one_coordinates(const Matrix& basis, const Matrix& a) {
  const Matrix gram = basis.transpose() * basis;
  const Matrix squared = gram.cwiseProduct(gram);
  Vector rhs(basis.cols());
  for (Eigen::Index k = 0; k < basis.cols(); ++k) rhs[k] = basis.col(k).dot(a * basis.col(k));
  return squared.fullPivLu().solve(rhs);
}

struct UniversalModel {
  MregModel model;
  std::vector<Vector> graph_loadings;  // per enumerated graph, canonical order
  double max_residual = 0.0;           // max-abs reconstruction error
};

/**
 * Builds the MREG representation of a distribution over all loop-allowed
 * binary graphs on n <= 3 vertices. `probs` must cover each graph exactly
 * once (any order). Mixture atoms with zero probability are omitted.
 */
inline UniversalModel universal_mreg(const std::vector<std::pair<Graph, double>>& probs) {
  detail::require(!probs.empty(), "universal_mreg: empty distribution");
  const std::size_t n = probs.front().first.size();
  detail::require(n >= 1 && n <= 3, "universal_mreg: n must be in 1..3");
  const std::uint64_t count = 1ULL << free_entries(n);
  detail::require(probs.size() == count, "universal_mreg: incomplete enumeration");

  std::vector<double> p(count, -1.0);
  double total = 0.0;
  for (const auto& [g, prob] : probs) {
    detail::require(g.size() == n, "universal_mreg: graphs must share n");
    detail::require(prob >= 0.0 && std::isfinite(prob), "universal_mreg: probabilities must be nonnegative");
    const auto idx = canonical_index(g);
    detail::require(p[idx] < 0.0, "universal_mreg: graph listed twice");
    p[idx] = prob;
    total += prob;
  }
  detail::require(std::abs(total - 1.0) <= 1e-12, "universal_mreg: probabilities must sum to 1");

  UniversalModel out;
  out.model.components = universal_basis(n);
  PointMassMixture mix;
  for (std::uint64_t i = 0; i < count; ++i) {
    const Matrix a = graph_from_index(n, i).to_dense();
    Vector lambda = rank_one_coordinates(out.model.components, a);
    const Matrix recon = out.model.components * lambda.asDiagonal() * out.model.components.transpose();
    out.max_residual = std::max(out.max_residual, (recon - a).cwiseAbs().maxCoeff());
    if (p[i] > 0.0) {
      mix.atoms.push_back(lambda);
      mix.weights.push_back(p[i]);
    }
    out.graph_loadings.push_back(std::move(lambda));
  }
  out.model.loadings = std::move(mix);
  if (out.max_residual > 1e-10) throw NumericError("universal_mreg: reconstruction residual too large");
  return out;
}

// ---------------------------------------------------------------------------

/// Upper bound on ||h' - h_1|| for the population minimizer h' of a
/// one-dimensional MREG: 2 E(lambda) / (E(lambda^2) (h_1'h')^2).
inline double bias_bound(double e_lambda, double e_lambda_sq, double cos_overlap) {
  detail::require(e_lambda_sq > 0.0, "bias_bound: E(lambda^2) must be positive");
  if (cos_overlap == 0.0) throw DataError("bias_bound: undefined for zero overlap");
  return 2.0 * e_lambda / (e_lambda_sq * cos_overlap * cos_overlap);
}

// ---------------------------------------------------------------------------
// Models of the two simulation studies.

/// n = 20, d = 3: h_1 constant, h_2 alternating signs, h_3 signs in pairs;
/// lambda ~ U(8,16) x U(0,4) x U(0,2).
inline MregModel bias_study_model() {
  constexpr std::size_t n = 20;
  Matrix h(n, 3);
  for (std::size_t s = 0; s < n; ++s) {
    h(s, 0) = 1.0;
    h(s, 1) = (s % 2 == 0) ? 1.0 : -1.0;
    h(s, 2) = (s % 4 < 2) ? 1.0 : -1.0;
  }
  h /= std::sqrt(static_cast<double>(n));
  UniformBox box{Vector(3), Vector(3)};
  box.lo << 8.0, 0.0, 0.0;
  box.hi << 16.0, 4.0, 2.0;
  return {h, box};
}

/// n = 100, d = 2: h_1 = 0.1 everywhere, h_2 = -0.1 on the first half and
/// 0.1 on the second; two equally likely loadings (25,5) and (22.5,2.5).
inline MregModel classify_study_model() {
  constexpr std::size_t n = 100;
  Matrix h(n, 2);
  for (std::size_t s = 0; s < n; ++s) {
    h(s, 0) = 0.1;
    h(s, 1) = s < n / 2 ? -0.1 : 0.1;
  }
  PointMassMixture mix;
  Vector a(2), b(2);
  a << 25.0, 5.0;
  b << 22.5, 2.5;
  mix.atoms = {a, b};
  mix.weights = {0.5, 0.5};
  return {h, mix};
}

}  // namespace jointembed::models

#endif  // JOINTEMBED_MODELS_HPP
