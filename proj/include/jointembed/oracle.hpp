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

#ifndef JOINTEMBED_ORACLE_HPP
#define JOINTEMBED_ORACLE_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>

#include "jointembed/embed.hpp"
#include "jointembed/error.hpp"
#include "jointembed/graph.hpp"
#include "jointembed/models.hpp"
#include "jointembed/parallel.hpp"

// Brute-force references for tiny problems. Slow by design; used by tests.
namespace jointembed::oracle {

struct GridSpec {
  std::size_t resolution = 64;  // grid points per pi of each angle
  std::size_t levels = 3;       // refinement passes, 10x finer each

  void validate() const {
    if (resolution < 8) throw UsageError("GridSpec: resolution must be >= 8");
  }
};

struct GridMin {
  Vector h;
  double value = 0.0;
};

namespace detail {

/// Unit vector from n-1 hyperspherical angles.
inline Vector from_angles(const std::vector<double>& phi, std::size_t n) {
  Vector h(static_cast<Eigen::Index>(n));
  double s = 1.0;
  for (std::size_t j = 0; j + 1 < n; ++j) {
    h[static_cast<Eigen::Index>(j)] = s * std::cos(phi[j]);
    s *= std::sin(phi[j]);
  }
  h[static_cast<Eigen::Index>(n - 1)] = s;
  return h / h.norm();
}

// Evaluates every point of the product grid center[j] + (idx - half) * step
// and returns the best (lowest linear index among ties).
inline std::pair<std::vector<double>, double> scan(const GraphSet& gs, const std::vector<double>& start,
                                                   const std::vector<double>& step, std::size_t count) {
  const std::size_t dims = start.size();
  std::size_t total = 1;
  for (std::size_t j = 0; j < dims; ++j) total *= count;
  std::vector<double> values(total);
  auto angles_at = [&](std::size_t linear) {
    std::vector<double> phi(dims);
    for (std::size_t j = 0; j < dims; ++j) {
      phi[j] = start[j] + static_cast<double>(linear % count) * step[j];
      linear /= count;
    }
    return phi;
  };
  const std::size_t n = gs.vertex_count();
  parallel::for_each_index(total, [&](std::size_t linear) {
    const Vector h = from_angles(angles_at(linear), n);
    double sum = 0.0;
    for (std::size_t i = 0; i < gs.size(); ++i) {
      const double q = quadratic_form(gs[i], h);
      sum += frobenius_norm_sq(gs[i]) - q * q;
    }
    values[linear] = sum / static_cast<double>(gs.size());
  });
  const auto best = static_cast<std::size_t>(std::min_element(values.begin(), values.end()) - values.begin());
  return {angles_at(best), values[best]};
}

}  // namespace detail

/**
 * Minimizes D_m(h) = (1/m) sum_i (||A_i||^2 - (h'A_i h)^2) over the unit
 * sphere by exhaustive search on a hyperspherical grid followed by `levels`
 * local passes (21 points per angle spanning +-1 previous step).
 */
inline GridMin sphere_grid_min(const GraphSet& gs, const GridSpec& spec = {}) {
  spec.validate();
  const std::size_t n = gs.vertex_count();
  if (n > 4) throw UsageError("sphere_grid_min: n must be <= 4");
  if (n == 1) {
    Vector h = Vector::Ones(1);
    return {h, sample_approx_error(gs, h)};
  }
  const std::size_t dims = n - 1;
  // h and -h give the same value, so the last angle only needs [0, pi).
  const double step0 = std::numbers::pi / static_cast<double>(spec.resolution);
  std::vector<double> start(dims, 0.0);
  std::vector<double> step(dims, step0);
  auto [phi, value] = detail::scan(gs, start, step, spec.resolution + 1);
  double width = step0;
  for (std::size_t level = 0; level < spec.levels; ++level) {
    const double fine = width / 10.0;
    for (std::size_t j = 0; j < dims; ++j) {
      start[j] = phi[j] - width;
      step[j] = fine;
    }
    auto [p, v] = detail::scan(gs, start, step, 21);
    if (v < value) {
      phi = std::move(p);
      value = v;
    }
    width = fine;
  }
  Vector h = detail::from_angles(phi, n);
  return {h, value};
}

struct ChiSquareReport {
  double statistic = 0.0;
  double p_value = 1.0;
  std::size_t dof = 0;
  std::size_t bins = 0;  // after pooling
  std::vector<std::size_t> counts;  // observed, per canonical index
  std::vector<std::string> warnings;
};

/**
 * Samples `samples` loop-allowed graphs from `model`, bins them by canonical
 * index and runs Pearson's chi-square test against `expected` (one
 * probability per canonical index). Bins with expected count below 5 are
 * pooled; a pool still below 5 joins the smallest regular bin.
 */
inline ChiSquareReport exhaustive_distribution_check(const models::MregModel& model,
                                                     const std::vector<double>& expected, std::size_t samples,
                                                     std::uint64_t seed) {
  const std::size_t n = model.vertex_count();
  if (n > 3) throw UsageError("exhaustive_distribution_check: n must be <= 3");
  const std::size_t count = std::size_t{1} << models::free_entries(n);
  jointembed::detail::require(expected.size() == count, "exhaustive_distribution_check: need one probability per graph");
  if (samples < 1) throw UsageError("exhaustive_distribution_check: samples must be >= 1");

  // Rank-one reconstructions are exact only up to rounding.
  const auto drawn = models::sample_mreg(model, samples, seed, true, models::ProbabilityPolicy::clamp);
  ChiSquareReport out;
  out.counts.assign(count, 0);
  for (const Graph& g : drawn.graphs.graphs()) ++out.counts[models::canonical_index(g)];

  const double total = static_cast<double>(samples);
  std::vector<std::pair<double, double>> bins;  // (observed, expected)
  std::pair<double, double> pool{0.0, 0.0};
  bool pooled = false;
  for (std::size_t i = 0; i < count; ++i) {
    const double e = expected[i] * total;
    if (e < 5.0) {
      pool.first += static_cast<double>(out.counts[i]);
      pool.second += e;
      pooled = true;
    } else {
      bins.emplace_back(static_cast<double>(out.counts[i]), e);
    }
  }
  if (pooled) {
    out.warnings.push_back("expected counts below 5 were pooled");
    if (pool.second >= 5.0 || bins.empty()) {
      bins.push_back(pool);
    } else {
      auto smallest = std::min_element(bins.begin(), bins.end(),
                                       [](const auto& a, const auto& b) { return a.second < b.second; });
      smallest->first += pool.first;
      smallest->second += pool.second;
    }
  }
  out.bins = bins.size();
  for (const auto& [o, e] : bins) {
    if (e > 0.0) {
      out.statistic += (o - e) * (o - e) / e;
    } else if (o > 0.0) {
      out.statistic = std::numeric_limits<double>::infinity();
    }
  }
  out.dof = bins.size() > 0 ? bins.size() - 1 : 0;
  if (out.dof == 0) {
    out.p_value = 1.0;
  } else if (std::isinf(out.statistic)) {
    out.p_value = 0.0;
  } else {
    const boost::math::chi_squared dist(static_cast<double>(out.dof));
    out.p_value = boost::math::cdf(boost::math::complement(dist, out.statistic));
  }
  return out;
}

}  // namespace jointembed::oracle

#endif  // JOINTEMBED_ORACLE_HPP
