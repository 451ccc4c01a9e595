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

#ifndef JOINTEMBED_INFERENCE_HPP
#define JOINTEMBED_INFERENCE_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/distributions/fisher_f.hpp>
#include <boost/math/distributions/students_t.hpp>

#include "jointembed/error.hpp"
#include "jointembed/graph.hpp"
#include "jointembed/numerics.hpp"
#include "jointembed/parallel.hpp"
#include "jointembed/rng.hpp"

namespace jointembed::inference {

/// m x p feature table, one row per graph.
struct FeatureMatrix {
  Matrix values;
  std::vector<std::string> names;

  FeatureMatrix(Matrix v, std::vector<std::string> n) : values(std::move(v)), names(std::move(n)) {
    jointembed::detail::require(static_cast<std::size_t>(values.cols()) == names.size(), "feature names must match columns");
    jointembed::detail::require(values.allFinite(), "feature values must be finite");
  }

  static FeatureMatrix numbered(Matrix v, const std::string& prefix) {
    std::vector<std::string> names;
    for (Eigen::Index j = 0; j < v.cols(); ++j) names.push_back(prefix + std::to_string(j + 1));
    return FeatureMatrix(std::move(v), std::move(names));
  }

  std::size_t rows() const { return static_cast<std::size_t>(values.rows()); }
  std::size_t cols() const { return static_cast<std::size_t>(values.cols()); }
};

/// Symmetric, nonnegative, zero-diagonal m x m matrix.
struct DistanceMatrix {
  Matrix values;

  explicit DistanceMatrix(Matrix v) : values(std::move(v)) {
    jointembed::detail::require(values.rows() == values.cols(), "distance matrix must be square");
    for (Eigen::Index i = 0; i < values.rows(); ++i) {
      jointembed::detail::require(values(i, i) == 0.0, "distance matrix must have a zero diagonal");
      for (Eigen::Index j = 0; j < values.cols(); ++j) {
        jointembed::detail::require(values(i, j) >= 0.0 && std::isfinite(values(i, j)), "distances must be finite and >= 0");
        jointembed::detail::require(values(i, j) == values(j, i), "distance matrix must be symmetric");
      }
    }
  }

  std::size_t size() const { return static_cast<std::size_t>(values.rows()); }
};

inline DistanceMatrix euclidean_distances(const Matrix& points) {
  const Eigen::Index m = points.rows();
  Matrix d = Matrix::Zero(m, m);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = i + 1; j < m; ++j) d(i, j) = d(j, i) = (points.row(i) - points.row(j)).norm();
  return DistanceMatrix(std::move(d));
}

// ---------------------------------------------------------------------------
// Leave-one-out k-NN

/// Leave-one-out k-NN accuracy. Distance ties go to the smaller index; vote
/// ties go to the smaller label.
inline double knn_loo_accuracy(const DistanceMatrix& dist, const std::vector<int>& labels, std::size_t k = 1) {
  const std::size_t m = dist.size();
  if (m < 2) throw DataError("knn_loo_accuracy: need at least 2 observations");
  jointembed::detail::require(labels.size() == m, "knn_loo_accuracy: one label per observation required");
  if (k < 1 || k > m - 1) throw UsageError("knn_loo_accuracy: need 1 <= k <= m-1");
  std::size_t correct = 0;
  std::vector<std::size_t> others;
  for (std::size_t i = 0; i < m; ++i) {
    others.clear();
    for (std::size_t j = 0; j < m; ++j)
      if (j != i) others.push_back(j);
    std::stable_sort(others.begin(), others.end(), [&](std::size_t a, std::size_t b) {
      return dist.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(a)) <
             dist.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(b));
    });
    std::map<int, std::size_t> votes;
    for (std::size_t r = 0; r < k; ++r) ++votes[labels[others[r]]];
    int predicted = votes.begin()->first;
    std::size_t best = 0;
    for (const auto& [label, count] : votes) {
      if (count > best) {
        best = count;
        predicted = label;
      }
    }
    if (predicted == labels[i]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(m);
}

inline double knn_loo_accuracy(const FeatureMatrix& features, const std::vector<int>& labels, std::size_t k = 1) {
  if (features.rows() < 2) throw DataError("knn_loo_accuracy: need at least 2 observations");
  return knn_loo_accuracy(euclidean_distances(features.values), labels, k);
}

// ---------------------------------------------------------------------------
// Per-graph spectral embeddings compared by orthogonal Procrustes

/// Adjacency spectral embedding: top-d eigenvectors (by |value|) scaled by
/// sqrt|value|.
inline Matrix spectral_embedding(const Graph& g, std::size_t d) {
  const auto pairs = numerics::top_eigs(g, {d, 1e-8, 20000});
  Matrix x(g.size(), d);
  for (std::size_t k = 0; k < d; ++k) {
    x.col(static_cast<Eigen::Index>(k)) = std::sqrt(std::abs(pairs[k].value)) * pairs[k].vector;
  }
  return x;
}

/// min over orthogonal W of ||x - y W||_F (reflections allowed).
inline double procrustes_distance(const Matrix& x, const Matrix& y) {
  jointembed::detail::require(x.rows() == y.rows() && x.cols() == y.cols(), "procrustes_distance: shape mismatch");
  const Eigen::JacobiSVD<Matrix> svd(y.transpose() * x, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Matrix w = svd.matrixU() * svd.matrixV().transpose();
  return (x - y * w).norm();
}

inline DistanceMatrix procrustes_distances(const std::vector<Matrix>& embeddings) {
  const std::size_t m = embeddings.size();
  Matrix d = Matrix::Zero(m, m);
  parallel::for_each_index(m, [&](std::size_t i) {
    for (std::size_t j = i + 1; j < m; ++j) {
      d(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = procrustes_distance(embeddings[i], embeddings[j]);
    }
  });
  for (Eigen::Index i = 0; i < d.rows(); ++i)
    for (Eigen::Index j = i + 1; j < d.cols(); ++j) d(j, i) = d(i, j);
  return DistanceMatrix(std::move(d));
}

inline DistanceMatrix ase_procrustes_distances(const GraphSet& gs, std::size_t d) {
  if (d < 1 || d > gs.vertex_count()) throw UsageError("ase_procrustes_distances: need 1 <= d <= n");
  std::vector<Matrix> emb(gs.size());
  parallel::for_each_index(gs.size(), [&](std::size_t i) { emb[i] = spectral_embedding(gs[i], d); });
  return procrustes_distances(emb);
}

/// D^{-1/2} A D^{-1/2}; rows and columns of zero-degree vertices are zero.
inline Graph normalized_adjacency(const Graph& g) {
  const std::size_t n = g.size();
  const Vector degree = matvec(g, Vector::Ones(static_cast<Eigen::Index>(n)));
  Vector scale(static_cast<Eigen::Index>(n));
  for (Eigen::Index s = 0; s < scale.size(); ++s) scale[s] = degree[s] > 0.0 ? 1.0 / std::sqrt(degree[s]) : 0.0;
  auto entries = g.upper_entries();
  for (Entry& e : entries) e.value *= scale[static_cast<Eigen::Index>(e.row)] * scale[static_cast<Eigen::Index>(e.col)];
  return Graph::sparse(n, std::move(entries), {true, true});
}

/// Laplacian-eigenmap baseline: Procrustes distances between spectral
/// embeddings of the normalized adjacency matrices.
inline DistanceMatrix laplacian_variant(const GraphSet& gs, std::size_t d) {
  if (d < 1 || d > gs.vertex_count()) throw UsageError("laplacian_variant: need 1 <= d <= n");
  std::vector<Matrix> emb(gs.size());
  parallel::for_each_index(gs.size(), [&](std::size_t i) { emb[i] = spectral_embedding(normalized_adjacency(gs[i]), d); });
  return procrustes_distances(emb);
}

// ---------------------------------------------------------------------------
// Feature extractors

/// Full adjacency spectrum per graph, sorted descending.
inline FeatureMatrix gss_features(const GraphSet& gs) {
  const std::size_t n = gs.vertex_count();
  Matrix out(gs.size(), n);
  parallel::for_each_index(gs.size(), [&](std::size_t i) {
    const Eigen::SelfAdjointEigenSolver<Matrix> eig(gs[i].to_dense(), Eigen::EigenvaluesOnly);
    if (eig.info() != Eigen::Success) throw NumericError("gss_features: eigensolver failed");
    out.row(static_cast<Eigen::Index>(i)) = eig.eigenvalues().reverse().transpose();
  });
  return FeatureMatrix::numbered(std::move(out), "eig");
}

/// Upper triangle (diagonal included) in row-major order.
inline Vector vectorize_upper(const Graph& g) {
  const std::size_t n = g.size();
  Vector v = Vector::Zero(static_cast<Eigen::Index>(n * (n + 1) / 2));
  auto offset = [n](std::size_t s) { return s * n - s * (s - 1) / 2; };
  for (const Entry& e : g.upper_entries()) v[static_cast<Eigen::Index>(offset(e.row) + (e.col - e.row))] = e.value;
  return v;
}

/// Top-d principal component scores of the centered, vectorized upper
/// triangles, from the eigendecomposition of the m x m Gram matrix.
inline FeatureMatrix pca_features(const GraphSet& gs, std::size_t d) {
  const std::size_t m = gs.size();
  const std::size_t n = gs.vertex_count();
  if (d < 1 || d > std::min(m, n * (n + 1) / 2)) throw UsageError("pca_features: need 1 <= d <= min(m, n(n+1)/2)");
  Matrix x(m, n * (n + 1) / 2);
  for (std::size_t i = 0; i < m; ++i) x.row(static_cast<Eigen::Index>(i)) = vectorize_upper(gs[i]).transpose();
  const Eigen::RowVectorXd mean = x.colwise().mean();
  x.rowwise() -= mean;
  const Matrix gram = x * x.transpose();
  const Eigen::SelfAdjointEigenSolver<Matrix> eig(gram);
  if (eig.info() != Eigen::Success) throw NumericError("pca_features: eigensolver failed");
  Matrix scores(m, d);
  for (std::size_t k = 0; k < d; ++k) {
    const Eigen::Index c = static_cast<Eigen::Index>(m - 1 - k);  // ascending order from Eigen
    Vector u = eig.eigenvectors().col(c);
    numerics::sign_fix(u);
    scores.col(static_cast<Eigen::Index>(k)) = std::sqrt(std::max(0.0, eig.eigenvalues()[c])) * u;
  }
  return FeatureMatrix::numbered(std::move(scores), "pc");
}

/// Topological statistics (self loops ignored): edge count, triangle count,
/// global clustering coefficient, max degree, degree variance.
inline FeatureMatrix gs_features(const GraphSet& gs) {
  const std::size_t n = gs.vertex_count();
  Matrix out(gs.size(), 5);
  for (std::size_t i = 0; i < gs.size(); ++i) {
    if (gs[i].weighted()) throw DataError("gs_features: graph statistics need unweighted graphs");
  }
  parallel::for_each_index(gs.size(), [&](std::size_t i) {
    std::vector<std::vector<std::size_t>> adj(n);
    double edges = 0.0;
    for (const Entry& e : gs[i].upper_entries()) {
      if (e.row == e.col) continue;
      adj[e.row].push_back(e.col);
      adj[e.col].push_back(e.row);
      edges += 1.0;
    }
    std::vector<char> mark(n, 0);
    double triangles = 0.0;
    for (std::size_t u = 0; u < n; ++u) {
      for (std::size_t w : adj[u]) mark[w] = 1;
      for (std::size_t v : adj[u]) {
        if (v <= u) continue;
        for (std::size_t w : adj[v])
          if (w > v && mark[w]) triangles += 1.0;
      }
      for (std::size_t w : adj[u]) mark[w] = 0;
    }
    double wedges = 0.0;
    double max_degree = 0.0;
    double mean_degree = 0.0;
    for (std::size_t u = 0; u < n; ++u) {
      const double deg = static_cast<double>(adj[u].size());
      wedges += deg * (deg - 1.0) / 2.0;
      max_degree = std::max(max_degree, deg);
      mean_degree += deg;
    }
    mean_degree /= static_cast<double>(n);
    double variance = 0.0;
    for (std::size_t u = 0; u < n; ++u) {
      const double diff = static_cast<double>(adj[u].size()) - mean_degree;
      variance += diff * diff;
    }
    variance /= static_cast<double>(n);
    const double clustering = wedges > 0.0 ? 3.0 * triangles / wedges : 0.0;
    out.row(static_cast<Eigen::Index>(i)) << edges, triangles, clustering, max_degree, variance;
  });
  return FeatureMatrix(std::move(out), {"edges", "triangles", "clustering", "max_degree", "degree_variance"});
}

// ---------------------------------------------------------------------------
// Clustering

struct KmeansResult {
  std::vector<int> labels;  // 0..K-1
  Matrix centers;           // K x p
  double wcss = 0.0;
};

namespace detail {

inline double sq_dist(const Matrix& a, Eigen::Index i, const Matrix& b, Eigen::Index j) {
  return (a.row(i) - b.row(j)).squaredNorm();
}

inline KmeansResult lloyd(const Matrix& x, std::size_t k, rng::Stream& stream, std::size_t max_iter) {
  const Eigen::Index m = x.rows();
  const auto kk = static_cast<Eigen::Index>(k);
  Matrix centers(kk, x.cols());
  // k-means++ seeding
  centers.row(0) = x.row(static_cast<Eigen::Index>(stream.below(static_cast<std::uint64_t>(m))));
  Vector nearest(m);
  for (Eigen::Index i = 0; i < m; ++i) nearest[i] = sq_dist(x, i, centers, 0);
  for (Eigen::Index c = 1; c < kk; ++c) {
    const double total = nearest.sum();
    Eigen::Index pick = 0;
    if (total > 0.0) {
      const double u = stream.uniform() * total;
      double acc = 0.0;
      pick = m - 1;
      for (Eigen::Index i = 0; i < m; ++i) {
        acc += nearest[i];
        if (u < acc && nearest[i] > 0.0) {
          pick = i;
          break;
        }
      }
    } else {
      pick = static_cast<Eigen::Index>(stream.below(static_cast<std::uint64_t>(m)));
    }
    centers.row(c) = x.row(pick);
    for (Eigen::Index i = 0; i < m; ++i) nearest[i] = std::min(nearest[i], sq_dist(x, i, centers, c));
  }

  std::vector<int> labels(static_cast<std::size_t>(m), -1);
  for (std::size_t iter = 0; iter < max_iter; ++iter) {
    bool changed = false;
    for (Eigen::Index i = 0; i < m; ++i) {
      int best = 0;
      double best_d = sq_dist(x, i, centers, 0);
      for (Eigen::Index c = 1; c < kk; ++c) {
        const double dc = sq_dist(x, i, centers, c);
        if (dc < best_d) {
          best_d = dc;
          best = static_cast<int>(c);
        }
      }
      if (labels[static_cast<std::size_t>(i)] != best) {
        labels[static_cast<std::size_t>(i)] = best;
        changed = true;
      }
    }
    Matrix sums = Matrix::Zero(kk, x.cols());
    std::vector<std::size_t> counts(k, 0);
    for (Eigen::Index i = 0; i < m; ++i) {
      sums.row(labels[static_cast<std::size_t>(i)]) += x.row(i);
      ++counts[static_cast<std::size_t>(labels[static_cast<std::size_t>(i)])];
    }
    for (Eigen::Index c = 0; c < kk; ++c) {
      if (counts[static_cast<std::size_t>(c)] > 0) {
        centers.row(c) = sums.row(c) / static_cast<double>(counts[static_cast<std::size_t>(c)]);
        continue;
      }
      // Empty cluster: move it to the point farthest from its center
      // (lowest index among ties).
      Eigen::Index far = 0;
      double far_d = -1.0;
      for (Eigen::Index i = 0; i < m; ++i) {
        const double di = sq_dist(x, i, centers, labels[static_cast<std::size_t>(i)]);
        if (di > far_d) {
          far_d = di;
          far = i;
        }
      }
      centers.row(c) = x.row(far);
      labels[static_cast<std::size_t>(far)] = static_cast<int>(c);
      changed = true;
    }
    if (!changed) break;
  }
  double wcss = 0.0;
  for (Eigen::Index i = 0; i < m; ++i) wcss += sq_dist(x, i, centers, labels[static_cast<std::size_t>(i)]);
  return {std::move(labels), std::move(centers), wcss};
}

}  // namespace detail

/// Lloyd's algorithm from seeded k-means++ starts; best of `restarts` runs by
/// within-cluster sum of squares (earliest run wins ties).
inline KmeansResult kmeans(const Matrix& points, std::size_t k, std::uint64_t seed, std::size_t restarts = 10,
                           std::size_t max_iter = 300) {
  const auto m = static_cast<std::size_t>(points.rows());
  if (k < 1 || k > m) throw UsageError("kmeans: need 1 <= K <= m");
  jointembed::detail::require(points.allFinite(), "kmeans: points must be finite");
  std::optional<KmeansResult> best;
  for (std::size_t r = 0; r < std::max<std::size_t>(1, restarts); ++r) {
    rng::Stream stream(rng::derive(rng::derive(seed, rng::Tag::kmeans), r));
    auto run = detail::lloyd(points, k, stream, max_iter);
    if (!best || run.wcss < best->wcss) best = std::move(run);
  }
  return std::move(*best);
}

// ---------------------------------------------------------------------------
// Partition agreement

inline std::map<std::pair<int, int>, double> contingency(const std::vector<int>& a, const std::vector<int>& b) {
  if (a.size() != b.size()) throw DataError("label vectors must have equal length");
  std::map<std::pair<int, int>, double> table;
  for (std::size_t i = 0; i < a.size(); ++i) table[{a[i], b[i]}] += 1.0;
  return table;
}

/// Adjusted Rand index. Two identical partitions (including two all-in-one
/// partitions) score 1.
inline double ari(const std::vector<int>& a, const std::vector<int>& b) {
  const auto table = contingency(a, b);
  auto choose2 = [](double x) { return x * (x - 1.0) / 2.0; };
  std::map<int, double> rows;
  std::map<int, double> cols;
  double index = 0.0;
  for (const auto& [key, count] : table) {
    index += choose2(count);
    rows[key.first] += count;
    cols[key.second] += count;
  }
  double sum_a = 0.0;
  double sum_b = 0.0;
  for (const auto& [key, count] : rows) sum_a += choose2(count);
  for (const auto& [key, count] : cols) sum_b += choose2(count);
  const double total = choose2(static_cast<double>(a.size()));
  if (total == 0.0) return 1.0;
  const double expected = sum_a * sum_b / total;
  const double max_index = 0.5 * (sum_a + sum_b);
  if (max_index == expected) return index == expected ? (sum_a == sum_b ? 1.0 : 0.0) : 0.0;
  return (index - expected) / (max_index - expected);
}

/// (1/m) sum over clusters of the size of the largest true class inside it.
inline double purity(const std::vector<int>& clusters, const std::vector<int>& truth) {
  const auto table = contingency(clusters, truth);
  if (clusters.empty()) throw DataError("purity: empty labelings");
  std::map<int, double> best;
  for (const auto& [key, count] : table) best[key.first] = std::max(best[key.first], count);
  double total = 0.0;
  for (const auto& [cluster, count] : best) total += count;
  return total / static_cast<double>(clusters.size());
}

// ---------------------------------------------------------------------------
// Linear regression

struct OlsResult {
  Vector coefficients;  // intercept first when fitted
  Vector standard_errors;
  Vector t_p_values;
  double r_squared = 0.0;
  double f_statistic = 0.0;
  double f_p_value = 1.0;
  double residual_variance = 0.0;
  Vector residuals;
};

/**
 * Ordinary least squares of `response` on the feature columns. With an
 * intercept, R^2 and the F test are relative to the intercept-only model;
 * without one they are uncentered (relative to the zero model).
 */
inline OlsResult ols_fit(const FeatureMatrix& features, const Vector& response, bool intercept = true) {
  const Eigen::Index m = features.values.rows();
  const Eigen::Index p = features.values.cols();
  jointembed::detail::require(response.size() == m, "ols_fit: one response per row required");
  jointembed::detail::require(response.allFinite(), "ols_fit: responses must be finite");
  const Eigen::Index cols = p + (intercept ? 1 : 0);
  if (m <= p + 1) throw DataError("ols_fit: need more observations than p + 1");
  Matrix x(m, cols);
  if (intercept) x.col(0).setOnes();
  x.rightCols(p) = features.values;
  const Eigen::ColPivHouseholderQR<Matrix> qr(x);
  if (qr.rank() < cols) throw NumericError("ols_fit: design matrix is rank deficient");

  OlsResult out;
  out.coefficients = qr.solve(response);
  out.residuals = response - x * out.coefficients;
  const double rss = out.residuals.squaredNorm();
  const double tss = intercept ? (response.array() - response.mean()).matrix().squaredNorm() : response.squaredNorm();
  const double df_model = static_cast<double>(intercept ? p : cols);
  const double df_resid = static_cast<double>(m - cols);
  out.r_squared = tss > 0.0 ? 1.0 - rss / tss : 0.0;
  out.residual_variance = rss / df_resid;
  if (df_model > 0.0) {
    if (rss == 0.0) {
      out.f_statistic = std::numeric_limits<double>::infinity();
      out.f_p_value = 0.0;
    } else {
      out.f_statistic = ((tss - rss) / df_model) / out.residual_variance;
      const boost::math::fisher_f dist(df_model, df_resid);
      out.f_p_value = out.f_statistic > 0.0 ? boost::math::cdf(boost::math::complement(dist, out.f_statistic)) : 1.0;
    }
  }
  const Matrix xtx_inv = (x.transpose() * x).inverse();
  out.standard_errors = (out.residual_variance * xtx_inv.diagonal()).cwiseSqrt();
  out.t_p_values.resize(cols);
  const boost::math::students_t tdist(df_resid);
  for (Eigen::Index j = 0; j < cols; ++j) {
    if (out.standard_errors[j] == 0.0) {
      out.t_p_values[j] = out.coefficients[j] == 0.0 ? 1.0 : 0.0;
      continue;
    }
    const double t = std::abs(out.coefficients[j] / out.standard_errors[j]);
    out.t_p_values[j] = 2.0 * boost::math::cdf(boost::math::complement(tdist, t));
  }
  return out;
}

}  // namespace jointembed::inference

#endif  // JOINTEMBED_INFERENCE_HPP
