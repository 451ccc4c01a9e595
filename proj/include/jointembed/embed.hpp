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

#ifndef JOINTEMBED_EMBED_HPP
#define JOINTEMBED_EMBED_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "jointembed/error.hpp"
#include "jointembed/graph.hpp"
#include "jointembed/numerics.hpp"
#include "jointembed/parallel.hpp"
#include "jointembed/rng.hpp"

namespace jointembed {

enum class InitMethod { mean_residual, random };

struct EmbedConfig {
  std::size_t d = 1;
  double outer_tol = 1e-7;  // relative objective decrease per (h, lambda) alternation
  std::size_t max_inner_iter = 500;
  numerics::ArmijoParams armijo;
  InitMethod init = InitMethod::mean_residual;
  std::size_t restarts = 0;  // extra random-start runs per dimension
  std::uint64_t seed = 0;

  void validate() const {
    if (d < 1) throw UsageError("embedding dimension d must be >= 1");
    if (!(outer_tol > 0.0)) throw UsageError("outer_tol must be positive");
    if (max_inner_iter < 1) throw UsageError("max_inner_iter must be >= 1");
    armijo.validate();
  }
};

struct EmbedResult {
  Matrix loadings;    // m x d, row i = loading of graph i
  Matrix components;  // n x d, unit columns
  std::vector<double> objective_per_dim;
  std::vector<std::vector<double>> inner_traces;
  std::vector<bool> converged;
  std::vector<bool> line_search_failed;
  std::vector<std::string> warnings;

  std::size_t dimension() const { return static_cast<std::size_t>(components.cols()); }

  /// Largest single-step increase over all inner traces and over
  /// objective_per_dim (<= 0 for a monotone run).
  double max_trace_increase() const {
    double worst = -std::numeric_limits<double>::infinity();
    auto scan = [&](const std::vector<double>& t) {
      for (std::size_t i = 1; i < t.size(); ++i) worst = std::max(worst, t[i] - t[i - 1]);
    };
    for (const auto& t : inner_traces) scan(t);
    scan(objective_per_dim);
    return worst;
  }
};

/// Columns fixed by earlier greedy steps: loadings m x k, components n x k.
struct Fitted {
  Matrix loadings;
  Matrix components;

  static Fitted empty(std::size_t m, std::size_t n) { return {Matrix(m, 0), Matrix(n, 0)}; }
};

namespace detail {

inline void check_prior(const GraphSet& gs, const Fitted& prior) {
  require(static_cast<std::size_t>(prior.loadings.rows()) == gs.size(), "prior loadings need one row per graph");
  require(static_cast<std::size_t>(prior.components.rows()) == gs.vertex_count(),
          "prior components need one row per vertex");
  require(prior.loadings.cols() == prior.components.cols(), "prior loadings/components column mismatch");
}

/// Per-graph quantities at a point h for the current greedy column.
struct Probe {
  Vector h;
  std::vector<Vector> ah;  // A_i h
  Vector overlap;          // H_prior' h
  Vector q;                // h' R_i h = h'A_i h - sum_k L_ik (h_k'h)^2
};

inline Probe evaluate(const GraphSet& gs, const Fitted& prior, Vector h) {
  const std::size_t m = gs.size();
  Probe p;
  p.overlap = prior.components.transpose() * h;
  const Vector overlap_sq = p.overlap.cwiseAbs2();
  p.ah.resize(m);
  p.q.resize(static_cast<Eigen::Index>(m));
  parallel::for_each_index(m, [&](std::size_t i) {
    Vector y(h.size());
    gs[i].multiply(h, y);
    const double correction = prior.loadings.cols() > 0 ? prior.loadings.row(i).dot(overlap_sq) : 0.0;
    p.q[static_cast<Eigen::Index>(i)] = h.dot(y) - correction;
    p.ah[i] = std::move(y);
  });
  p.h = std::move(h);
  return p;
}

/// Gradient of sum_i ||R_i - lambda_i h h'||^2 in h:
/// -4 sum_i lambda_i A_i h + 4 sum_k (sum_i lambda_i L_ik)(h_k'h) h_k + 4 (sum_i lambda_i^2)(h'h) h.
inline Vector gradient(const Probe& p, const Fitted& prior, const Vector& lambda) {
  Vector g = Vector::Zero(p.h.size());
  for (std::size_t i = 0; i < p.ah.size(); ++i) g.noalias() -= 4.0 * lambda[static_cast<Eigen::Index>(i)] * p.ah[i];
  if (prior.components.cols() > 0) {
    const Vector w = prior.loadings.transpose() * lambda;
    g.noalias() += 4.0 * (prior.components * w.cwiseProduct(p.overlap));
  }
  g += 4.0 * lambda.squaredNorm() * p.h.squaredNorm() * p.h;
  return g;
}

/// sum_i ||R_i - lambda_i h h'||^2 given residual mass C = sum_i ||R_i||^2.
inline double subproblem_value(double residual_mass, const Probe& p, const Vector& lambda) {
  const double hh = p.h.squaredNorm();
  return residual_mass - 2.0 * lambda.dot(p.q) + lambda.squaredNorm() * hh * hh;
}

/// Per-graph ||A_i - sum_k L_ik h_k h_k'||^2 via the expansion
/// ||A||^2 - 2 sum_k L_ik h_k'A h_k + L_i' G L_i with G = (H'H).^2.
inline Vector residual_norms(const GraphSet& gs, const Matrix& loadings, const Matrix& components) {
  const std::size_t m = gs.size();
  const Matrix hh = components.transpose() * components;
  const Matrix gram = hh.cwiseProduct(hh);
  Vector out(static_cast<Eigen::Index>(m));
  parallel::for_each_index(m, [&](std::size_t i) {
    const Graph& a = gs[i];
    double value = a.squared_norm();
    Vector y(components.rows());
    for (Eigen::Index k = 0; k < components.cols(); ++k) {
      const Vector hk = components.col(k);
      a.multiply(hk, y);
      value -= 2.0 * loadings(static_cast<Eigen::Index>(i), k) * hk.dot(y);
    }
    if (components.cols() > 0) {
      const Vector li = loadings.row(static_cast<Eigen::Index>(i)).transpose();
      value += li.dot(gram * li);
    }
    out[static_cast<Eigen::Index>(i)] = value;
  });
  return out;
}

inline double ordered_sum(const Vector& v) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) total += v[i];
  return total;
}

}  // namespace detail

// ---------------------------------------------------------------------------

/// f(L, H) = sum_i ||A_i - sum_k L_ik h_k h_k'||_F^2 (diagonals included).
inline double objective(const GraphSet& gs, const Matrix& loadings, const Matrix& components) {
  detail::require(static_cast<std::size_t>(loadings.rows()) == gs.size() &&
                      static_cast<std::size_t>(components.rows()) == gs.vertex_count() &&
                      loadings.cols() == components.cols(),
                  "objective: dimension mismatch");
  return detail::ordered_sum(detail::residual_norms(gs, loadings, components));
}

/// Optimal loadings for a fixed direction h given the prior columns:
/// lambda_i = h'A_i h - sum_k L_ik (h'h_k)^2.
inline Vector update_lambda_col(const GraphSet& gs, const Fitted& prior, const Vector& h) {
  detail::check_prior(gs, prior);
  detail::require(static_cast<std::size_t>(h.size()) == gs.vertex_count(), "update_lambda_col: dimension mismatch");
  return detail::evaluate(gs, prior, h).q;
}

/// Gradient in h of sum_i ||R_i - lambda_i h h'||^2, R_i the residual after
/// the prior columns, evaluated without forming R_i.
inline Vector grad_h(const GraphSet& gs, const Fitted& prior, const Vector& lambda_col, const Vector& h) {
  detail::check_prior(gs, prior);
  detail::require(static_cast<std::size_t>(h.size()) == gs.vertex_count() &&
                      static_cast<std::size_t>(lambda_col.size()) == gs.size(),
                  "grad_h: dimension mismatch");
  return detail::gradient(detail::evaluate(gs, prior, h), prior, lambda_col);
}

/// (1/m) sum_i ||A_i - <A_i, hh'> hh'||^2 = (1/m) sum_i (||A_i||^2 - (h'A_i h)^2).
inline double sample_approx_error(const GraphSet& gs, const Vector& h) {
  detail::require(static_cast<std::size_t>(h.size()) == gs.vertex_count(), "sample_approx_error: dimension mismatch");
  detail::require(std::abs(h.norm() - 1.0) <= 1e-10, "sample_approx_error: h must have unit norm");
  Vector per(static_cast<Eigen::Index>(gs.size()));
  parallel::for_each_index(gs.size(), [&](std::size_t i) {
    const double q = quadratic_form(gs[i], h);
    per[static_cast<Eigen::Index>(i)] = frobenius_norm_sq(gs[i]) - q * q;
  });
  return detail::ordered_sum(per) / static_cast<double>(gs.size());
}

// ---------------------------------------------------------------------------
// Greedy solver

/// How the per-graph loadings of the current column are set from the exact
/// per-graph optimum q_i = h'R_i h.
enum class LoadingRule { free, classwise };

struct DimensionFit {
  Vector lambda;
  Vector h;
  std::vector<double> trace;
  bool converged = false;
  bool line_search_failed = false;
};

namespace detail {

inline Vector apply_rule(LoadingRule rule, const Vector& q, const std::vector<int>* labels) {
  if (rule == LoadingRule::free) return q;
  const int classes = *std::max_element(labels->begin(), labels->end());
  std::vector<double> sum(static_cast<std::size_t>(classes) + 1, 0.0);
  std::vector<double> count(static_cast<std::size_t>(classes) + 1, 0.0);
  for (std::size_t i = 0; i < labels->size(); ++i) {
    sum[static_cast<std::size_t>((*labels)[i])] += q[static_cast<Eigen::Index>(i)];
    count[static_cast<std::size_t>((*labels)[i])] += 1.0;
  }
  Vector out(q.size());
  for (std::size_t i = 0; i < labels->size(); ++i) {
    const auto c = static_cast<std::size_t>((*labels)[i]);
    out[static_cast<Eigen::Index>(i)] = sum[c] / count[c];
  }
  return out;
}

/// Leading eigenvector of the mean residual (1/m) sum_i R_i, applied as
/// mean(A) v - sum_k mean(L_k) (h_k'v) h_k.
inline Vector mean_residual_direction(const Graph& mean_graph, const Fitted& prior) {
  const Vector mean_loading = prior.loadings.colwise().mean().transpose();
  auto apply = [&](const Vector& x, Vector& y) {
    mean_graph.multiply(x, y);
    if (prior.components.cols() > 0) {
      y.noalias() -= prior.components * mean_loading.cwiseProduct(prior.components.transpose() * x);
    }
  };
  return numerics::top_eigs(apply, mean_graph.size(), {1, 1e-10, 10000}).front().vector;
}

inline Vector random_direction(std::uint64_t seed, std::size_t dim, std::size_t restart, std::size_t n) {
  rng::Stream stream(rng::derive(rng::derive(rng::derive(seed, rng::Tag::init), dim), restart));
  Vector h(static_cast<Eigen::Index>(n));
  for (Eigen::Index s = 0; s < h.size(); ++s) h[s] = stream.normal();
  return h / h.norm();
}

/**
 * Alternates an Armijo step on h (renormalized to the sphere) with the exact
 * loading update until the relative objective decrease of one alternation
 * drops below outer_tol. The next trial step is twice the last accepted one.
 */
inline DimensionFit descend(const GraphSet& gs, const Fitted& prior, double residual_mass, Vector h0,
                            const EmbedConfig& cfg, LoadingRule rule) {
  const std::vector<int>* labels = gs.labels() ? &*gs.labels() : nullptr;
  Probe probe = evaluate(gs, prior, std::move(h0));
  Vector lambda = apply_rule(rule, probe.q, labels);
  double f = subproblem_value(residual_mass, probe, lambda);
  if (!std::isfinite(f)) throw NumericError("joint embedding: non-finite objective");

  DimensionFit fit;
  fit.trace.push_back(f);
  numerics::ArmijoParams armijo = cfg.armijo;
  for (std::size_t iter = 0; iter < cfg.max_inner_iter; ++iter) {
    const Vector g = gradient(probe, prior, lambda);
    if (g.squaredNorm() == 0.0) {
      fit.converged = true;
      break;
    }
    const Vector dir = -g;
    std::optional<Probe> last;
    auto value_at = [&](const Vector& candidate) {
      last.emplace(evaluate(gs, prior, candidate));
      return subproblem_value(residual_mass, *last, lambda);
    };
    const auto step = numerics::armijo_search(value_at, probe.h, f, g, dir, armijo, numerics::SphereRetraction{});
    if (!step.accepted) {
      fit.converged = true;
      fit.line_search_failed = true;
      break;
    }
    Vector next_lambda = apply_rule(rule, last->q, labels);
    const double next_f = subproblem_value(residual_mass, *last, next_lambda);
    if (!std::isfinite(next_f)) throw NumericError("joint embedding: non-finite objective");
    if (next_f > f) {
      // Rounding can only undo a decrease smaller than the representable
      // precision of f; stop at the better point.
      fit.converged = true;
      break;
    }
    const double decrease = (f - next_f) / std::max(std::abs(f), std::numeric_limits<double>::min());
    probe = std::move(*last);
    lambda = std::move(next_lambda);
    f = next_f;
    fit.trace.push_back(f);
    armijo.initial_step = step.step / armijo.shrink;
    if (decrease < cfg.outer_tol) {
      fit.converged = true;
      break;
    }
  }
  fit.h = std::move(probe.h);
  fit.lambda = std::move(lambda);
  numerics::sign_fix(fit.h);
  return fit;
}

inline void warn_collinear(EmbedResult& res, Eigen::Index k) {
  for (Eigen::Index l = 0; l < k; ++l) {
    const double c = res.components.col(k).dot(res.components.col(l));
    if (c * c > 1.0 - 1e-6) {
      res.warnings.push_back("component " + std::to_string(k + 1) + " is nearly collinear with component " +
                             std::to_string(l + 1) + "; {h_k h_k'} may be linearly dependent");
    }
  }
}

inline void check_embed_args(const GraphSet& gs, const EmbedConfig& cfg) {
  cfg.validate();
  const std::size_t n = gs.vertex_count();
  if (cfg.d > n * (n + 1) / 2) throw UsageError("embedding dimension d exceeds n(n+1)/2");
}

inline EmbedResult greedy_embed(const GraphSet& gs, const EmbedConfig& cfg, LoadingRule rule) {
  check_embed_args(gs, cfg);
  const std::size_t m = gs.size();
  const std::size_t n = gs.vertex_count();
  const Graph mean_graph = mean_adjacency(gs);
  Vector norms(static_cast<Eigen::Index>(m));
  parallel::for_each_index(m, [&](std::size_t i) { norms[static_cast<Eigen::Index>(i)] = gs[i].squared_norm(); });
  double residual_mass = ordered_sum(norms);

  EmbedResult res;
  res.loadings = Matrix(m, cfg.d);
  res.components = Matrix(n, cfg.d);
  for (std::size_t k = 0; k < cfg.d; ++k) {
    const auto kk = static_cast<Eigen::Index>(k);
    const Fitted prior{res.loadings.leftCols(kk), res.components.leftCols(kk)};
    std::optional<DimensionFit> best;
    for (std::size_t r = 0; r <= cfg.restarts; ++r) {
      Vector h0 = (r == 0 && cfg.init == InitMethod::mean_residual) ? mean_residual_direction(mean_graph, prior)
                                                                    : random_direction(cfg.seed, k, r, n);
      DimensionFit fit = descend(gs, prior, residual_mass, std::move(h0), cfg, rule);
      if (!best || fit.trace.back() < best->trace.back()) best = std::move(fit);
    }
    res.loadings.col(kk) = best->lambda;
    res.components.col(kk) = best->h;
    residual_mass = best->trace.back();
    res.objective_per_dim.push_back(residual_mass);
    res.inner_traces.push_back(std::move(best->trace));
    res.converged.push_back(best->converged);
    res.line_search_failed.push_back(best->line_search_failed);
    warn_collinear(res, kk);
  }
  return res;
}

}  // namespace detail

/// Fits the next greedy column (lambda, h) given the prior columns.
inline DimensionFit embed_dimension(const GraphSet& gs, const Fitted& prior, const EmbedConfig& cfg) {
  detail::check_prior(gs, prior);
  cfg.validate();
  const double residual_mass = objective(gs, prior.loadings, prior.components);
  const auto k = static_cast<std::size_t>(prior.components.cols());
  std::optional<DimensionFit> best;
  for (std::size_t r = 0; r <= cfg.restarts; ++r) {
    Vector h0 = (r == 0 && cfg.init == InitMethod::mean_residual)
                    ? detail::mean_residual_direction(mean_adjacency(gs), prior)
                    : detail::random_direction(cfg.seed, k, r, gs.vertex_count());
    DimensionFit fit = detail::descend(gs, prior, residual_mass, std::move(h0), cfg, LoadingRule::free);
    if (!best || fit.trace.back() < best->trace.back()) best = std::move(fit);
  }
  return std::move(*best);
}

/// d-dimensional joint embedding by greedy alternating descent.
inline EmbedResult joint_embed(const GraphSet& gs, const EmbedConfig& cfg) {
  return detail::greedy_embed(gs, cfg, LoadingRule::free);
}

/// Loadings constrained equal within each class: the loading update assigns
/// every graph the class mean of the per-graph optima.
inline EmbedResult joint_embed_classwise(const GraphSet& gs, const EmbedConfig& cfg) {
  if (!gs.labels()) throw DataError("joint_embed_classwise: graph set has no labels");
  return detail::greedy_embed(gs, cfg, LoadingRule::classwise);
}

struct SharedEmbedding {
  Vector loadings;    // d
  Matrix components;  // n x d
};

/// Loadings shared by all graphs: closed form from the top-d eigenpairs (by
/// magnitude) of the mean adjacency matrix.
inline SharedEmbedding joint_embed_shared(const GraphSet& gs, std::size_t d) {
  const std::size_t n = gs.vertex_count();
  if (d < 1 || d > n) throw UsageError("joint_embed_shared: need 1 <= d <= n");
  const Graph mean_graph = mean_adjacency(gs);
  const auto pairs = numerics::top_eigs(mean_graph, {d, 1e-10, 10000});
  SharedEmbedding out{Vector(static_cast<Eigen::Index>(d)), Matrix(n, d)};
  for (std::size_t k = 0; k < d; ++k) {
    out.loadings[static_cast<Eigen::Index>(k)] = pairs[k].value;
    out.components.col(static_cast<Eigen::Index>(k)) = pairs[k].vector;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Nonnegative loadings: the loading step refits columns 1..k jointly by NNLS.

namespace detail {

/// Per-graph NNLS of ||A_i - sum_k x_k h_k h_k'||^2 over x >= 0, written as
/// ||S x - S^+ b_i||^2 with S'S = G. `b` holds h_k'A_i h_k (m x k).
inline Matrix nonneg_loadings(const Matrix& components, const Matrix& b) {
  const Matrix hh = components.transpose() * components;
  const Matrix gram = hh.cwiseProduct(hh);
  const auto eig = numerics::jacobi_eigen(gram);
  const Eigen::Index k = gram.rows();
  const double top = std::max(eig.values.cwiseAbs().maxCoeff(), std::numeric_limits<double>::min());
  Matrix root(k, k);     // Sigma^{1/2} V'
  Matrix pseudo(k, k);   // Sigma^{-1/2} V'
  for (Eigen::Index j = 0; j < k; ++j) {
    const double s = eig.values[j] > 1e-14 * top ? eig.values[j] : 0.0;
    root.row(j) = std::sqrt(s) * eig.vectors.col(j).transpose();
    pseudo.row(j) = (s > 0.0 ? 1.0 / std::sqrt(s) : 0.0) * eig.vectors.col(j).transpose();
  }
  Matrix out(b.rows(), k);
  parallel::for_each_index(static_cast<std::size_t>(b.rows()), [&](std::size_t i) {
    const Vector rhs = pseudo * b.row(static_cast<Eigen::Index>(i)).transpose();
    out.row(static_cast<Eigen::Index>(i)) = numerics::nnls(root, rhs, 1e-12).transpose();
  });
  return out;
}

/// Full objective from cached b (m x k) and per-graph ||A_i||^2.
inline double expanded_objective(const Vector& norms, const Matrix& b, const Matrix& loadings, const Matrix& components) {
  const Matrix hh = components.transpose() * components;
  const Matrix gram = hh.cwiseProduct(hh);
  double total = 0.0;
  for (Eigen::Index i = 0; i < loadings.rows(); ++i) {
    const Vector li = loadings.row(i).transpose();
    total += norms[i] - 2.0 * li.dot(b.row(i).transpose()) + li.dot(gram * li);
  }
  return total;
}

struct NonnegFit {
  Matrix loadings;  // m x (k+1), all columns refit
  Vector h;
  std::vector<double> trace;
  bool converged = false;
  bool line_search_failed = false;
};

inline NonnegFit descend_nonneg(const GraphSet& gs, const Vector& norms, const Matrix& prior_b,
                                const Matrix& prior_components, Vector h0, const EmbedConfig& cfg) {
  const auto m = static_cast<Eigen::Index>(gs.size());
  const Eigen::Index k = prior_components.cols();
  Matrix components(prior_components.rows(), k + 1);
  components.leftCols(k) = prior_components;
  Matrix b(m, k + 1);
  b.leftCols(k) = prior_b;

  auto refit = [&](const Probe& p, Matrix& loadings) {
    components.col(k) = p.h;
    for (Eigen::Index i = 0; i < m; ++i) b(i, k) = p.h.dot(p.ah[static_cast<std::size_t>(i)]);
    loadings = nonneg_loadings(components, b);
    return expanded_objective(norms, b, loadings, components);
  };

  NonnegFit fit;
  Fitted prior{Matrix(m, k), prior_components};
  Probe probe = evaluate(gs, prior, std::move(h0));
  double f = refit(probe, fit.loadings);
  fit.trace.push_back(f);
  numerics::ArmijoParams armijo = cfg.armijo;
  for (std::size_t iter = 0; iter < cfg.max_inner_iter; ++iter) {
    // With loadings fixed, the objective in h is the greedy subproblem whose
    // residual uses the current (refit) prior columns.
    prior.loadings = fit.loadings.leftCols(k);
    const Vector lambda = fit.loadings.col(k);
    const double residual_mass =
        expanded_objective(norms, b.leftCols(k), prior.loadings, components.leftCols(k));
    probe = evaluate(gs, prior, probe.h);
    const double f_here = subproblem_value(residual_mass, probe, lambda);
    const Vector g = gradient(probe, prior, lambda);
    if (g.squaredNorm() == 0.0) {
      fit.converged = true;
      break;
    }
    std::optional<Probe> last;
    auto value_at = [&](const Vector& candidate) {
      last.emplace(evaluate(gs, prior, candidate));
      return subproblem_value(residual_mass, *last, lambda);
    };
    const auto step = numerics::armijo_search(value_at, probe.h, f_here, g, Vector(-g), armijo,
                                              numerics::SphereRetraction{});
    if (!step.accepted) {
      fit.converged = true;
      fit.line_search_failed = true;
      break;
    }
    Matrix next_loadings;
    const Matrix saved_b = b;
    const double next_f = refit(*last, next_loadings);
    if (!std::isfinite(next_f)) throw NumericError("joint embedding: non-finite objective");
    if (next_f > f) {
      b = saved_b;
      components.col(k) = probe.h;
      fit.converged = true;
      break;
    }
    const double decrease = (f - next_f) / std::max(std::abs(f), std::numeric_limits<double>::min());
    probe = std::move(*last);
    fit.loadings = std::move(next_loadings);
    f = next_f;
    fit.trace.push_back(f);
    armijo.initial_step = step.step / armijo.shrink;
    if (decrease < cfg.outer_tol) {
      fit.converged = true;
      break;
    }
  }
  fit.h = probe.h;
  numerics::sign_fix(fit.h);
  return fit;
}

}  // namespace detail

/// Joint embedding with all loadings constrained nonnegative. After each
/// direction update, loadings of columns 1..k are refit jointly per graph by
/// nonnegative least squares.
inline EmbedResult joint_embed_nonneg(const GraphSet& gs, const EmbedConfig& cfg) {
  detail::check_embed_args(gs, cfg);
  const std::size_t m = gs.size();
  const std::size_t n = gs.vertex_count();
  const Graph mean_graph = mean_adjacency(gs);
  Vector norms(static_cast<Eigen::Index>(m));
  for (std::size_t i = 0; i < m; ++i) norms[static_cast<Eigen::Index>(i)] = gs[i].squared_norm();

  EmbedResult res;
  res.loadings = Matrix::Zero(m, cfg.d);
  res.components = Matrix::Zero(n, cfg.d);
  Matrix b(m, 0);  // h_k' A_i h_k for accepted columns
  for (std::size_t k = 0; k < cfg.d; ++k) {
    const auto kk = static_cast<Eigen::Index>(k);
    const Matrix prior_components = res.components.leftCols(kk);
    const Fitted prior{res.loadings.leftCols(kk), prior_components};
    std::optional<detail::NonnegFit> best;
    for (std::size_t r = 0; r <= cfg.restarts; ++r) {
      Vector h0 = (r == 0 && cfg.init == InitMethod::mean_residual)
                      ? detail::mean_residual_direction(mean_graph, prior)
                      : detail::random_direction(cfg.seed, k, r, n);
      auto fit = detail::descend_nonneg(gs, norms, b, prior_components, std::move(h0), cfg);
      if (!best || fit.trace.back() < best->trace.back()) best = std::move(fit);
    }
    res.components.col(kk) = best->h;
    res.loadings.leftCols(kk + 1) = best->loadings;
    Matrix grown(m, kk + 1);
    grown.leftCols(kk) = b;
    for (std::size_t i = 0; i < m; ++i) {
      grown(static_cast<Eigen::Index>(i), kk) = quadratic_form(gs[i], best->h);
    }
    b = std::move(grown);
    res.objective_per_dim.push_back(best->trace.back());
    res.inner_traces.push_back(std::move(best->trace));
    res.converged.push_back(best->converged);
    res.line_search_failed.push_back(best->line_search_failed);
    detail::warn_collinear(res, kk);
  }
  return res;
}

// ---------------------------------------------------------------------------

enum class ProjectionMode { greedy, joint };

/**
 * Loadings of a new graph on fitted components. Greedy mode repeats the
 * sequential training-time update lambda_k = h_k'A h_k - sum_{l<k} lambda_l
 * (h_k'h_l)^2; joint mode is the least-squares projection onto
 * span{h_k h_k'}, solving G lambda = b with G[k][l] = (h_k'h_l)^2.
 */
inline Vector project_graph(const Graph& a, const Matrix& components, ProjectionMode mode = ProjectionMode::greedy) {
  detail::require(static_cast<std::size_t>(components.rows()) == a.size(), "project_graph: dimension mismatch");
  const Eigen::Index d = components.cols();
  Vector b(d);
  for (Eigen::Index k = 0; k < d; ++k) b[k] = quadratic_form(a, components.col(k));
  const Matrix hh = components.transpose() * components;
  const Matrix gram = hh.cwiseProduct(hh);
  if (mode == ProjectionMode::joint) {
    const auto lu = gram.fullPivLu();
    if (!lu.isInvertible() || lu.rcond() < 1e-12) throw NumericError("project_graph: singular component Gram matrix");
    return lu.solve(b);
  }
  Vector lambda(d);
  for (Eigen::Index k = 0; k < d; ++k) {
    double v = b[k];
    for (Eigen::Index l = 0; l < k; ++l) v -= lambda[l] * gram(k, l);
    lambda[k] = v;
  }
  return lambda;
}

enum class NegativeLoadingPolicy { signed_sqrt, reject };

/// Vertex positions of graph i: column k is h_k s(lambda_ik), s(x) =
/// sign(x) sqrt|x|. Optionally scales every nonzero row to unit norm.
inline Matrix latent_positions(const EmbedResult& res, std::size_t i,
                               NegativeLoadingPolicy policy = NegativeLoadingPolicy::signed_sqrt,
                               bool normalize_rows = false) {
  detail::require(i < static_cast<std::size_t>(res.loadings.rows()), "latent_positions: graph index out of range");
  Matrix x = res.components;
  for (Eigen::Index k = 0; k < x.cols(); ++k) {
    const double l = res.loadings(static_cast<Eigen::Index>(i), k);
    if (l < 0.0 && policy == NegativeLoadingPolicy::reject) {
      throw DataError("latent_positions: negative loading for graph " + std::to_string(i));
    }
    x.col(k) *= std::copysign(std::sqrt(std::abs(l)), l);
  }
  if (normalize_rows) {
    for (Eigen::Index s = 0; s < x.rows(); ++s) {
      const double nr = x.row(s).norm();
      if (nr > 0.0) x.row(s) /= nr;
    }
  }
  return x;
}

struct ScreeRow {
  std::size_t k = 0;
  double objective = 0.0;
  double mean_abs_loading = 0.0;
};

/// Objective after each dimension and mean |loading| per column.
inline std::vector<ScreeRow> scree(const EmbedResult& res) {
  std::vector<ScreeRow> rows;
  for (std::size_t k = 0; k < res.objective_per_dim.size(); ++k) {
    rows.push_back({k + 1, res.objective_per_dim[k],
                    res.loadings.col(static_cast<Eigen::Index>(k)).cwiseAbs().mean()});
  }
  return rows;
}

}  // namespace jointembed

#endif  // JOINTEMBED_EMBED_HPP
