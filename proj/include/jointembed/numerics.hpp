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

#ifndef JOINTEMBED_NUMERICS_HPP
#define JOINTEMBED_NUMERICS_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "jointembed/error.hpp"
#include "jointembed/graph.hpp"
#include "jointembed/rng.hpp"

namespace jointembed::numerics {

/// Flips v so that its entry of largest magnitude is positive. Ties go to the
/// smallest index. The zero vector is left alone.
inline void sign_fix(Eigen::Ref<Vector> v) {
  Eigen::Index best = 0;
  double best_abs = -1.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v[i]) > best_abs) {
      best_abs = std::abs(v[i]);
      best = i;
    }
  }
  if (best_abs > 0.0 && v[best] < 0.0) v = -v;
}

// ---------------------------------------------------------------------------
// Dense symmetric eigensolver (cyclic Jacobi). Used for the small projected
// problems inside top_eigs and as the direct route for n <= 64.

struct SymmetricEigen {
  Vector values;
  Matrix vectors;  // column j pairs with values[j]
};

inline SymmetricEigen jacobi_eigen(const Matrix& input, int max_sweeps = 100) {
  detail::require(input.rows() == input.cols(), "jacobi_eigen: matrix must be square");
  const Eigen::Index n = input.rows();
  Matrix a = 0.5 * (input + input.transpose());
  Matrix v = Matrix::Identity(n, n);
  const double scale = std::max(a.norm(), std::numeric_limits<double>::min());

  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double off = 0.0;
    for (Eigen::Index p = 0; p < n; ++p)
      for (Eigen::Index q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    if (std::sqrt(2.0 * off) <= 1e-15 * scale) break;

    for (Eigen::Index p = 0; p < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (Eigen::Index k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }
  return {a.diagonal(), v};
}

/// Indices of `values` ordered by descending magnitude; equal magnitudes put
/// the positive value first.
inline std::vector<Eigen::Index> order_by_magnitude(const Vector& values) {
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(values.size()));
  std::iota(idx.begin(), idx.end(), Eigen::Index{0});
  std::stable_sort(idx.begin(), idx.end(), [&](Eigen::Index a, Eigen::Index b) {
    const double fa = std::abs(values[a]);
    const double fb = std::abs(values[b]);
    if (fa != fb) return fa > fb;
    return values[a] > values[b];
  });
  return idx;
}

// ---------------------------------------------------------------------------
// Leading eigenpairs of a matrix-free symmetric operator.

struct EigRequest {
  std::size_t k = 1;
  double tol = 1e-10;
  std::size_t max_iter = 10000;
};

struct EigPair {
  double value = 0.0;
  Vector vector;
};

/**
 * k eigenpairs of largest |eigenvalue| of the symmetric operator `apply`
 * (apply(x, y) sets y = A x), ordered by descending |value|.
 *
 * Block power iteration: a block of b > k vectors is multiplied by A and
 * re-orthonormalized each sweep; a Rayleigh-Ritz step on the block extracts
 * the current Ritz pairs. Deflation is implicit in the orthonormalization.
 * Converged when every wanted pair has ||A v - value v|| <= tol max(1,|value|).
 * Vectors are unit norm and sign-fixed.
 */
template <typename Apply>
std::vector<EigPair> top_eigs(Apply&& apply, std::size_t n, const EigRequest& req) {
  if (req.k < 1 || req.k > n) throw UsageError("top_eigs: need 1 <= k <= n");
  if (!(req.tol > 0.0)) throw UsageError("top_eigs: tol must be positive");
  const auto ni = static_cast<Eigen::Index>(n);
  const auto k = static_cast<Eigen::Index>(req.k);
  const Eigen::Index b = std::min<Eigen::Index>(ni, std::max<Eigen::Index>(2 * k, k + 8));

  // Fixed pseudo-random start block: results depend only on the operator.
  Matrix q(ni, b);
  rng::Stream start(rng::derive(0x5eedULL, static_cast<std::uint64_t>(n)));
  for (Eigen::Index j = 0; j < b; ++j)
    for (Eigen::Index i = 0; i < ni; ++i) q(i, j) = start.normal();

  auto orthonormalize = [&](const Matrix& m) -> Matrix {
    Eigen::HouseholderQR<Matrix> qr(m);
    return qr.householderQ() * Matrix::Identity(ni, b);
  };
  q = orthonormalize(q);

  Matrix z(ni, b);
  Vector x(ni);
  Vector y(ni);
  double best_residual = std::numeric_limits<double>::infinity();
  for (std::size_t iter = 0; iter < req.max_iter; ++iter) {
    for (Eigen::Index j = 0; j < b; ++j) {
      x = q.col(j);
      apply(x, y);
      z.col(j) = y;
    }
    Matrix t = q.transpose() * z;
    t = 0.5 * (t + t.transpose()).eval();
    const SymmetricEigen ritz = jacobi_eigen(t);
    const auto order = order_by_magnitude(ritz.values);

    std::vector<EigPair> pairs;
    double worst = 0.0;
    bool converged = true;
    for (Eigen::Index j = 0; j < k; ++j) {
      const Eigen::Index c = order[static_cast<std::size_t>(j)];
      const double theta = ritz.values[c];
      Vector v = q * ritz.vectors.col(c);
      const Vector av = z * ritz.vectors.col(c);
      const double nv = v.norm();
      const double res = (av - theta * v).norm() / nv;
      worst = std::max(worst, res / std::max(1.0, std::abs(theta)));
      if (res > req.tol * std::max(1.0, std::abs(theta))) converged = false;
      v /= nv;
      pairs.push_back({theta, std::move(v)});
    }
    best_residual = std::min(best_residual, worst);
    if (converged || b == ni) {
      if (!converged && b == ni && worst > 1e-6) {
        throw ConvergenceError("top_eigs: full-space Rayleigh-Ritz did not resolve eigenpairs", worst);
      }
      for (auto& p : pairs) sign_fix(p.vector);
      return pairs;
    }
    // Next block spans A q, reordered so the wanted Ritz directions lead.
    Matrix ordered(ni, b);
    for (Eigen::Index j = 0; j < b; ++j) ordered.col(j) = z * ritz.vectors.col(order[static_cast<std::size_t>(j)]);
    q = orthonormalize(ordered);
  }
  throw ConvergenceError("top_eigs: no convergence after " + std::to_string(req.max_iter) +
                             " iterations (best relative residual " + std::to_string(best_residual) + ")",
                         best_residual);
}

/// top_eigs on an explicit symmetric matrix.
inline std::vector<EigPair> top_eigs(const Matrix& a, const EigRequest& req) {
  return top_eigs([&](const Vector& x, Vector& y) { y.noalias() = a * x; }, static_cast<std::size_t>(a.rows()),
                  req);
}

/// top_eigs on a graph's adjacency matrix.
inline std::vector<EigPair> top_eigs(const Graph& g, const EigRequest& req) {
  return top_eigs([&](const Vector& x, Vector& y) { g.multiply(x, y); }, g.size(), req);
}

// ---------------------------------------------------------------------------
// Armijo backtracking

struct ArmijoParams {
  double c1 = 1e-4;
  double shrink = 0.5;
  double initial_step = 1.0;
  std::size_t max_backtracks = 50;

  void validate() const {
    if (!(c1 > 0.0 && c1 < 1.0)) throw UsageError("armijo: c1 must lie in (0,1)");
    if (!(shrink > 0.0 && shrink < 1.0)) throw UsageError("armijo: shrink must lie in (0,1)");
    if (!(initial_step > 0.0)) throw UsageError("armijo: initial_step must be positive");
  }
};

struct ArmijoResult {
  Vector x;           // accepted point, or the input point on failure
  double step = 0.0;  // accepted step, 0 on failure
  double f = 0.0;
  bool accepted = false;
  std::size_t evaluations = 0;
};

struct NoRetraction {
  void operator()(Vector&) const noexcept {}
};

/// Projection onto the unit sphere.
struct SphereRetraction {
  void operator()(Vector& x) const {
    const double nx = x.norm();
    if (nx > 0.0) x /= nx;
  }
};

/**
 * Backtracking line search. Tries steps initial_step * shrink^j, j = 0, 1, ...
 * and accepts the first candidate x+ = retract(x + step dir) with
 * f(x+) <= f(x) + c1 step g'dir. On failure (max_backtracks exhausted) the
 * input point is returned with accepted == false.
 */
template <typename F, typename Retract = NoRetraction>
ArmijoResult armijo_search(F&& f, const Vector& x, double fx, const Vector& g, const Vector& dir,
                           const ArmijoParams& p, Retract&& retract = {}) {
  p.validate();
  const double slope = g.dot(dir);
  if (!(slope < 0.0)) throw UsageError("armijo_search: direction is not a descent direction");
  double step = p.initial_step;
  ArmijoResult out;
  for (std::size_t j = 0; j <= p.max_backtracks; ++j) {
    Vector candidate = x + step * dir;
    retract(candidate);
    const double fc = f(candidate);
    ++out.evaluations;
    if (std::isfinite(fc) && fc <= fx + p.c1 * step * slope) {
      out.x = std::move(candidate);
      out.step = step;
      out.f = fc;
      out.accepted = true;
      return out;
    }
    step *= p.shrink;
  }
  out.x = x;
  out.f = fx;
  return out;
}

template <typename F, typename Retract = NoRetraction>
ArmijoResult armijo_search(F&& f, const Vector& x, const Vector& g, const Vector& dir, const ArmijoParams& p,
                           Retract&& retract = {}) {
  const double fx = f(x);
  return armijo_search(f, x, fx, g, dir, p, std::forward<Retract>(retract));
}

// ---------------------------------------------------------------------------
// Nonnegative least squares (Lawson-Hanson active set)

/// argmin ||M x - b||^2 subject to x >= 0.
inline Vector nnls(const Matrix& m, const Vector& b, double kkt_tol = 1e-8) {
  detail::require(m.rows() == b.size(), "nnls: dimension mismatch");
  const Eigen::Index q = m.cols();
  Vector x = Vector::Zero(q);
  if (q == 0) return x;
  std::vector<bool> passive(static_cast<std::size_t>(q), false);
  const double scale = std::max(1.0, (m.transpose() * b).cwiseAbs().maxCoeff());
  const double tol = kkt_tol * scale;

  auto solve_passive = [&]() {
    std::vector<Eigen::Index> cols;
    for (Eigen::Index j = 0; j < q; ++j)
      if (passive[static_cast<std::size_t>(j)]) cols.push_back(j);
    Matrix sub(m.rows(), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t c = 0; c < cols.size(); ++c) sub.col(static_cast<Eigen::Index>(c)) = m.col(cols[c]);
    const Vector zs = sub.colPivHouseholderQr().solve(b);
    Vector z = Vector::Zero(q);
    for (std::size_t c = 0; c < cols.size(); ++c) z[cols[c]] = zs[static_cast<Eigen::Index>(c)];
    return z;
  };

  const std::size_t max_outer = 3 * static_cast<std::size_t>(q) + 10;
  for (std::size_t outer = 0; outer < max_outer; ++outer) {
    const Vector w = m.transpose() * (b - m * x);
    Eigen::Index pick = -1;
    double best = tol;
    for (Eigen::Index j = 0; j < q; ++j) {
      if (!passive[static_cast<std::size_t>(j)] && w[j] > best) {
        best = w[j];
        pick = j;
      }
    }
    if (pick < 0) break;
    passive[static_cast<std::size_t>(pick)] = true;

    for (std::size_t inner = 0; inner <= static_cast<std::size_t>(q); ++inner) {
      const Vector z = solve_passive();
      bool feasible = true;
      for (Eigen::Index j = 0; j < q; ++j)
        if (passive[static_cast<std::size_t>(j)] && z[j] <= 0.0) feasible = false;
      if (feasible) {
        x = z;
        break;
      }
      double alpha = 1.0;
      for (Eigen::Index j = 0; j < q; ++j) {
        if (passive[static_cast<std::size_t>(j)] && z[j] <= 0.0) {
          alpha = std::min(alpha, x[j] / (x[j] - z[j]));
        }
      }
      x += alpha * (z - x);
      for (Eigen::Index j = 0; j < q; ++j) {
        if (passive[static_cast<std::size_t>(j)] && x[j] <= 1e-14 * std::max(1.0, x.cwiseAbs().maxCoeff())) {
          passive[static_cast<std::size_t>(j)] = false;
          x[j] = 0.0;
        }
      }
    }
  }
  for (Eigen::Index j = 0; j < q; ++j) x[j] = std::max(0.0, x[j]);
  return x;
}

// ---------------------------------------------------------------------------

/// Central-difference gradient.
template <typename F>
Vector finite_diff_grad(F&& f, const Vector& x, double eps = 1e-6) {
  Vector g(x.size());
  Vector probe = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    probe[i] = x[i] + eps;
    const double up = f(probe);
    probe[i] = x[i] - eps;
    const double down = f(probe);
    probe[i] = x[i];
    g[i] = (up - down) / (2.0 * eps);
  }
  return g;
}

}  // namespace jointembed::numerics

#endif  // JOINTEMBED_NUMERICS_HPP
