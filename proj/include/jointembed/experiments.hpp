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

#ifndef JOINTEMBED_EXPERIMENTS_HPP
#define JOINTEMBED_EXPERIMENTS_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "jointembed/embed.hpp"
#include "jointembed/error.hpp"
#include "jointembed/graph.hpp"
#include "jointembed/inference.hpp"
#include "jointembed/models.hpp"
#include "jointembed/rng.hpp"

namespace jointembed::experiments {

/// Largest single-step increase seen in any solver trace of a run.
struct TraceAudit {
  double max_increase = -std::numeric_limits<double>::infinity();
  std::size_t runs = 0;

  void add(const EmbedResult& res) {
    max_increase = std::max(max_increase, res.max_trace_increase());
    ++runs;
  }
};

inline double aligned_distance(const Vector& estimate, const Vector& truth) {
  return estimate.dot(truth) >= 0.0 ? (estimate - truth).norm() : (estimate + truth).norm();
}

inline Vector align_to(Vector v, const Vector& reference) {
  if (v.dot(reference) < 0.0) v = -v;
  return v;
}

// ---------------------------------------------------------------------------
// Bias and convergence of the greedy estimates as m doubles.

struct BiasRow {
  std::size_t rep = 0;
  std::size_t m = 0;
  std::size_t k = 0;  // 1-based component
  double bias = 0.0;
  std::optional<double> delta;  // distance to the estimate at m/2
};

struct BiasExperiment {
  std::vector<BiasRow> rows;
  TraceAudit audit;

  std::string csv() const {
    std::string out = "rep,m,k,bias,delta\n";
    for (const auto& r : rows) {
      out += std::to_string(r.rep) + ',' + std::to_string(r.m) + ',' + std::to_string(r.k) + ',' +
             jointembed::detail::format_double(r.bias) + ',' +
             (r.delta ? jointembed::detail::format_double(*r.delta) : std::string()) + '\n';
    }
    return out;
  }

  /// Mean of `bias` (or `delta`) over reps at one (m, k).
  double mean(std::size_t m, std::size_t k, bool delta = false) const {
    double sum = 0.0;
    std::size_t count = 0;
    for (const auto& r : rows) {
      if (r.m != m || r.k != k) continue;
      if (delta && !r.delta) continue;
      sum += delta ? *r.delta : r.bias;
      ++count;
    }
    if (count == 0) throw DataError("no rows for the requested (m, k)");
    return sum / static_cast<double>(count);
  }
};

/**
 * Each replicate samples m_max graphs (with self loops) from the three
 * component study model, then embeds the nested prefixes of size
 * 16, 32, ..., m_max with d = 3. Edge probabilities above 1 are clamped.
 */
inline BiasExperiment run_bias(std::size_t reps, std::size_t m_max, std::uint64_t seed,
                               const EmbedConfig& base = {}) {
  if (reps < 1) throw UsageError("experiment-bias: reps must be >= 1");
  if (m_max < 16 || (m_max & (m_max - 1)) != 0) throw UsageError("experiment-bias: m_max must be a power of 2 >= 16");
  const auto model = models::bias_study_model();
  const std::size_t d = model.dimension();
  EmbedConfig cfg = base;
  cfg.d = d;
  BiasExperiment out;
  for (std::size_t rep = 0; rep < reps; ++rep) {
    const std::uint64_t rep_seed = rng::derive(rng::derive(seed, rng::Tag::experiment), rep);
    const auto sample = models::sample_mreg(model, m_max, rep_seed, true, models::ProbabilityPolicy::clamp);
    std::optional<Matrix> previous;
    for (std::size_t m = 16; m <= m_max; m *= 2) {
      const auto res = joint_embed(sample.graphs.prefix(m), cfg);
      out.audit.add(res);
      Matrix aligned(res.components.rows(), static_cast<Eigen::Index>(d));
      for (std::size_t k = 0; k < d; ++k) {
        const auto kk = static_cast<Eigen::Index>(k);
        aligned.col(kk) = align_to(res.components.col(kk), model.components.col(kk));
        BiasRow row{rep, m, k + 1, (aligned.col(kk) - model.components.col(kk)).norm(), std::nullopt};
        if (previous) row.delta = (aligned.col(kk) - previous->col(kk)).norm();
        out.rows.push_back(row);
      }
      previous = std::move(aligned);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// 1-NN classification of graphs from two loading classes.

inline const std::vector<std::string>& classify_methods() {
  static const std::vector<std::string> names{"JE", "ASE", "LE", "GSS", "PCA", "GS"};
  return names;
}

struct AccuracyRow {
  std::string method;
  std::size_t m = 0;
  std::size_t rep = 0;
  double accuracy = 0.0;
};

struct ClassifyExperiment {
  std::vector<AccuracyRow> rows;
  TraceAudit audit;

  std::string csv() const {
    std::string out = "method,m,rep,accuracy\n";
    for (const auto& r : rows) {
      out += r.method + ',' + std::to_string(r.m) + ',' + std::to_string(r.rep) + ',' +
             jointembed::detail::format_double(r.accuracy) + '\n';
    }
    return out;
  }

  double mean(const std::string& method, std::size_t m) const {
    double sum = 0.0;
    std::size_t count = 0;
    for (const auto& r : rows) {
      if (r.method == method && r.m == m) {
        sum += r.accuracy;
        ++count;
      }
    }
    if (count == 0) throw DataError("no rows for method " + method);
    return sum / static_cast<double>(count);
  }
};

struct ClassifyOptions {
  std::size_t d = 2;             // embedding dimension for every method
  bool shuffle_labels = false;  // chance-level control
};

/// Balanced two-class sample: graph i takes loading class i mod 2.
inline GraphSet classify_sample(std::size_t m, std::uint64_t seed) {
  auto model = models::classify_study_model();
  const auto& atoms = std::get<models::PointMassMixture>(model.loadings).atoms;
  models::FixedList list;
  std::vector<int> labels;
  for (std::size_t i = 0; i < m; ++i) {
    list.loadings.push_back(atoms[i % 2]);
    labels.push_back(static_cast<int>(i % 2) + 1);
  }
  model.loadings = std::move(list);
  auto sample = models::sample_mreg(model, m, seed, false);
  return sample.graphs.with_labels(std::move(labels));
}

inline std::vector<int> shuffled(std::vector<int> labels, std::uint64_t key) {
  rng::Stream stream(key);
  for (std::size_t i = labels.size(); i > 1; --i) std::swap(labels[i - 1], labels[stream.below(i)]);
  return labels;
}

inline ClassifyExperiment run_classify(const std::vector<std::size_t>& m_list, std::size_t reps, std::uint64_t seed,
                                       const ClassifyOptions& opt = {}) {
  if (m_list.empty()) throw UsageError("experiment-classify: empty m list");
  for (std::size_t m : m_list) {
    if (m < 4 || m % 2 != 0) throw UsageError("experiment-classify: every m must be even and >= 4");
  }
  if (reps < 1) throw UsageError("experiment-classify: reps must be >= 1");
  ClassifyExperiment out;
  const std::uint64_t root = rng::derive(seed, rng::Tag::experiment);
  for (std::size_t rep = 0; rep < reps; ++rep) {
    for (std::size_t m : m_list) {
      const std::uint64_t key = rng::derive(rng::derive(root, rep), m);
      const GraphSet gs = classify_sample(m, key);
      std::vector<int> labels = *gs.labels();
      if (opt.shuffle_labels) labels = shuffled(std::move(labels), rng::derive(key, rng::Tag::labels));

      EmbedConfig cfg;
      cfg.d = opt.d;
      cfg.seed = key;
      const auto je = joint_embed(gs, cfg);
      out.audit.add(je);
      using namespace inference;
      const std::vector<double> acc{
          knn_loo_accuracy(FeatureMatrix::numbered(je.loadings, "l"), labels),
          knn_loo_accuracy(ase_procrustes_distances(gs, opt.d), labels),
          knn_loo_accuracy(laplacian_variant(gs, opt.d), labels),
          knn_loo_accuracy(gss_features(gs), labels),
          knn_loo_accuracy(pca_features(gs, opt.d), labels),
          knn_loo_accuracy(gs_features(gs), labels),
      };
      for (std::size_t j = 0; j < acc.size(); ++j) out.rows.push_back({classify_methods()[j], m, rep, acc[j]});
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Population-bias bound for Erdos-Renyi graphs with self loops.

struct BoundCheck {
  double error = 0.0;    // sign-aligned ||h - h_1||
  double overlap = 0.0;  // |h'h_1|
  double bound = 0.0;
  double e_lambda = 0.0;
  double e_lambda_sq = 0.0;
  TraceAudit audit;

  bool within_bound() const { return error <= bound; }
};

/// m graphs with A_st ~ Bernoulli(p) for all s <= t, a one-dimensional MREG
/// with h_1 = 1/sqrt(n) and lambda = np; d = 1 joint embedding.
inline BoundCheck run_bound_check(std::size_t n, double p, std::size_t m, std::uint64_t seed) {
  if (n < 2) throw UsageError("bound-check: n must be >= 2");
  if (!(p > 0.0 && p <= 1.0)) throw UsageError("bound-check: p must lie in (0, 1]");
  if (m < 1) throw UsageError("bound-check: m must be >= 1");
  models::MregModel model;
  model.components = Vector::Constant(static_cast<Eigen::Index>(n), 1.0 / std::sqrt(static_cast<double>(n)));
  const double lambda = static_cast<double>(n) * p;
  model.loadings = models::UniformBox{Vector::Constant(1, lambda), Vector::Constant(1, lambda)};
  const auto sample = models::sample_mreg(model, m, seed, true);

  EmbedConfig cfg;
  cfg.d = 1;
  const auto res = joint_embed(sample.graphs, cfg);
  BoundCheck out;
  out.audit.add(res);
  const Vector h1 = model.components.col(0);
  const Vector h = res.components.col(0);
  out.error = aligned_distance(h, h1);
  out.overlap = std::abs(h.dot(h1));
  out.e_lambda = lambda;
  out.e_lambda_sq = lambda * lambda;
  out.bound = models::bias_bound(out.e_lambda, out.e_lambda_sq, out.overlap);
  return out;
}

}  // namespace jointembed::experiments

#endif  // JOINTEMBED_EXPERIMENTS_HPP
