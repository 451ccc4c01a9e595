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

// Acceptance checks: one PASS/FAIL line per criterion. Exit status is the
// number of failures.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>

#include "jointembed/cli.hpp"
#include "jointembed/embed.hpp"
#include "jointembed/experiments.hpp"
#include "jointembed/models.hpp"
#include "jointembed/numerics.hpp"
#include "jointembed/oracle.hpp"
#include "support.hpp"

namespace je = jointembed;
namespace fs = std::filesystem;
using je::GraphSet;
using je::Matrix;
using je::Vector;

namespace {

je::experiments::TraceAudit audit;  // every solver run below

je::EmbedResult embed(const GraphSet& gs, std::size_t d) {
  je::EmbedConfig cfg;
  cfg.d = d;
  auto res = je::joint_embed(gs, cfg);
  audit.add(res);
  return res;
}

struct Outcome {
  bool pass = true;
  std::string detail;
};

int failures = 0;

void criterion(int id, double limit_seconds, const std::function<Outcome()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (limit_seconds > 0 && secs > limit_seconds) {
    o.pass = false;
    o.detail += "; over time limit";
  }
  failures += o.pass ? 0 : 1;
  std::printf("%s criterion %d: %s (%.1fs)\n", o.pass ? "PASS" : "FAIL", id, o.detail.c_str(), secs);
  std::fflush(stdout);
}

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

Outcome single_graph_ase() {
  double worst_obj = 0, worst_dot = 1;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const std::size_t n = 2 + seed % 31;
    const Matrix a = je::testing::random_symmetric(n, seed);
    const auto res = embed(GraphSet({je::Graph::dense(a, {true, true})}), 1);
    const Eigen::SelfAdjointEigenSolver<Matrix> eig(a);
    Eigen::Index top = 0;
    eig.eigenvalues().cwiseAbs().maxCoeff(&top);
    const double lam = eig.eigenvalues()[top];
    const double expected = a.squaredNorm() - lam * lam;
    worst_obj = std::max(worst_obj, std::abs(res.objective_per_dim[0] - expected) / std::max(expected, 1e-300));
    worst_dot = std::min(worst_dot, std::abs(res.components.col(0).dot(eig.eigenvectors().col(top))));
  }
  return {worst_obj <= 1e-6 && worst_dot >= 1 - 1e-8,
          fmt("max relative objective gap %.2e, min |h'v1| = 1 - %.2e", worst_obj, 1 - worst_dot)};
}

Outcome shared_closed_form() {
  double worst = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const std::size_t n = 6 + seed % 10, m = 2 + seed % 5, d = 1 + seed % 3;
    const GraphSet gs = je::testing::random_weighted_set(m, n, seed + 100);
    const auto shared = je::joint_embed_shared(gs, d);
    const Eigen::SelfAdjointEigenSolver<Matrix> eig(je::mean_adjacency(gs).to_dense());
    const auto order = je::numerics::order_by_magnitude(eig.eigenvalues());
    for (std::size_t k = 0; k < d; ++k) {
      const auto kk = static_cast<Eigen::Index>(k);
      const Vector v = eig.eigenvectors().col(order[k]);
      const Vector h = shared.components.col(kk);
      worst = std::max(worst, std::abs(shared.loadings[kk] - eig.eigenvalues()[order[k]]));
      worst = std::max(worst, std::min((h - v).cwiseAbs().maxCoeff(), (h + v).cwiseAbs().maxCoeff()));
    }
  }
  return {worst <= 1e-8, fmt("max deviation from reference eigenpairs %.2e", worst)};
}

Outcome gradient_check() {
  double worst_fd = 0, worst_dense = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const std::size_t n = 2 + seed % 15, m = 1 + seed % 8, k = seed % 4;
    const GraphSet gs = je::testing::random_weighted_set(m, n, seed + 200);
    je::rng::Stream s(seed + 300);
    je::Fitted prior{Matrix(m, k), Matrix(n, k)};
    for (std::size_t j = 0; j < k; ++j) {
      prior.components.col(static_cast<Eigen::Index>(j)) = je::testing::random_unit(n, seed * 7 + j);
      for (std::size_t i = 0; i < m; ++i) prior.loadings(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = s.uniform(-2, 2);
    }
    Vector lambda(static_cast<Eigen::Index>(m));
    for (Eigen::Index i = 0; i < lambda.size(); ++i) lambda[i] = s.uniform(-3, 3);
    const Vector h = je::testing::random_unit(n, seed + 400) * s.uniform(0.5, 1.5);
    std::vector<Matrix> residual;
    for (std::size_t i = 0; i < m; ++i)
      residual.push_back(je::testing::dense_residual(gs[i], prior.loadings.row(static_cast<Eigen::Index>(i)).transpose(), prior.components));
    auto f = [&](const Vector& x) {
      double total = 0;
      for (std::size_t i = 0; i < m; ++i) total += (residual[i] - lambda[static_cast<Eigen::Index>(i)] * x * x.transpose()).squaredNorm();
      return total;
    };
    const Vector g = je::grad_h(gs, prior, lambda, h);
    const Vector fd = je::numerics::finite_diff_grad(f, h);
    worst_fd = std::max(worst_fd, (g - fd).norm() / std::max(fd.norm(), 1e-12));

    Vector dense = Vector::Zero(static_cast<Eigen::Index>(n));
    Vector q_dense(static_cast<Eigen::Index>(m));
    const Vector u = h / h.norm();
    for (std::size_t i = 0; i < m; ++i) {
      const double li = lambda[static_cast<Eigen::Index>(i)];
      dense -= 4.0 * li * (residual[i] - li * h * h.transpose()) * h;
      q_dense[static_cast<Eigen::Index>(i)] = u.dot(residual[i] * u);
    }
    const double scale = std::max(1.0, dense.norm());
    worst_dense = std::max(worst_dense, (g - dense).norm() / scale);
    worst_dense = std::max(worst_dense, (je::update_lambda_col(gs, prior, u) - q_dense).cwiseAbs().maxCoeff() /
                                            std::max(1.0, q_dense.cwiseAbs().maxCoeff()));
    Matrix loadings(m, k + 1), comps(n, k + 1);
    loadings << prior.loadings, lambda;
    comps << prior.components, u;
    const double naive = je::testing::naive_objective(gs, loadings, comps);
    worst_dense = std::max(worst_dense, std::abs(je::objective(gs, loadings, comps) - naive) / std::max(1.0, naive));
  }
  return {worst_fd <= 1e-5 && worst_dense <= 1e-10,
          fmt("max finite-difference relative error %.2e, max dense-form gap %.2e", worst_fd, worst_dense)};
}

Outcome tiny_oracle() {
  double worst = -1e300;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const std::size_t m = 1 + seed % 3;
    const GraphSet gs = je::testing::random_binary_set(m, 3, 0.5, seed + 500);
    const auto res = embed(gs, 1);
    const auto grid = je::oracle::sphere_grid_min(gs);
    worst = std::max(worst, res.objective_per_dim[0] / static_cast<double>(m) - grid.value);
  }
  return {worst <= 1e-3, fmt("max (objective/m - grid minimum) = %.2e", worst)};
}

Outcome universal_construction() {
  std::vector<std::pair<je::Graph, double>> probs;
  for (const auto& g : je::models::enumerate_graphs(2)) probs.emplace_back(g, 0.125);
  const auto u = je::models::universal_mreg(probs);
  const auto chi = je::oracle::exhaustive_distribution_check(u.model, std::vector<double>(8, 0.125), 10000, 2024);
  return {u.max_residual <= 1e-10 && chi.p_value > 0.001,
          fmt("max residual %.2e, chi-square %.3f, p = %.4f", u.max_residual, chi.statistic, chi.p_value)};
}

Outcome bias_reproduction() {
  const auto exp = je::experiments::run_bias(5, 4096, 20240601);
  audit.max_increase = std::max(audit.max_increase, exp.audit.max_increase);
  audit.runs += exp.audit.runs;
  const double b2 = exp.mean(4096, 2), b3 = exp.mean(4096, 3);
  bool delta_ok = true;
  std::string deltas;
  for (std::size_t k = 1; k <= 3; ++k) {
    const double early = exp.mean(64, k, true), late = exp.mean(4096, k, true);
    delta_ok = delta_ok && late < early;
    deltas += fmt(" delta_k%.0f %.4f -> %.4f", static_cast<double>(k), early, late);
  }
  const bool range_ok = b2 >= 0.05 && b2 <= 0.2 && b3 >= 0.1 && b3 <= 0.3;
  return {range_ok && delta_ok,
          fmt("bias at m=4096: h2 %.4f (target [0.05,0.2]), h3 %.4f (target [0.1,0.3]);", b2, b3) + deltas +
              (range_ok ? "" : "; bias range not met") + (delta_ok ? "" : "; delta trend not met")};
}

Outcome classify_reproduction() {
  const auto exp = je::experiments::run_classify({200}, 20, 20240602);
  audit.max_increase = std::max(audit.max_increase, exp.audit.max_increase);
  audit.runs += exp.audit.runs;
  const double ref = exp.mean("JE", 200);
  bool ok = true;
  std::string detail = fmt("JE %.3f", ref);
  for (const auto& method : je::experiments::classify_methods()) {
    if (method == "JE") continue;
    const double acc = exp.mean(method, 200);
    ok = ok && ref >= acc;
    detail += " " + method + fmt(" %.3f", acc);
  }
  return {ok, "mean accuracy at m=200: " + detail};
}

Outcome bound_reproduction() {
  double worst = 0;
  for (std::uint64_t seed : {1, 2, 3}) {
    const auto r = je::experiments::run_bound_check(100, 0.5, 1024, seed);
    audit.max_increase = std::max(audit.max_increase, r.audit.max_increase);
    audit.runs += r.audit.runs;
    worst = std::max(worst, r.error);
  }
  return {worst <= 0.04, fmt("max sign-aligned error over 3 seeds %.4f (limit 0.04)", worst)};
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

Outcome determinism() {
  const fs::path root = fs::temp_directory_path() / "jointembed_acceptance";
  fs::remove_all(root);
  fs::create_directories(root);
  std::ostringstream sink;
  auto cli = [&](std::vector<std::string> args) {
    args.insert(args.begin(), "jointembed");
    const int code = je::cli::run(args, sink, sink);
    if (code != 0) throw std::runtime_error("command failed: " + args[1] + ": " + sink.str());
  };
  std::ofstream(root / "er.txt") << "kind=er\nn=40\np=0.3\nloops=1\n";
  cli({"sample", "--model", (root / "er.txt").string(), "--m", "24", "--seed", "11", "--out", (root / "s").string()});
  const std::string manifest = (root / "s" / "manifest.tsv").string();

  struct Command {
    std::vector<std::string> args;
    std::vector<std::string> files;
  };
  const std::vector<Command> commands{
      {{"embed", "--manifest", manifest, "--d", "3", "--seed", "5", "--restarts", "2"},
       {"lambda.csv", "h.csv", "trace.csv", "scree.csv", "metrics.txt"}},
      {{"experiment-bias", "--reps", "2", "--m-max", "128", "--seed", "5"}, {"bias_curves.csv", "metrics.txt"}},
      {{"experiment-classify", "--m-list", "4,20", "--reps", "2", "--seed", "5"}, {"accuracy.csv", "metrics.txt"}},
      {{"bound-check", "--n", "30", "--p", "0.4", "--m", "64", "--seed", "5"}, {"metrics.txt"}},
  };
  std::size_t compared = 0;
  for (std::size_t c = 0; c < commands.size(); ++c) {
    std::vector<fs::path> dirs;
    for (const char* threads : {"1", "1", "4"}) {
      dirs.push_back(root / (std::to_string(c) + "_" + std::to_string(dirs.size())));
      auto args = commands[c].args;
      args.insert(args.end(), {"--threads", threads, "--out", dirs.back().string()});
      cli(args);
    }
    for (const auto& f : commands[c].files) {
      const std::string ref = slurp(dirs[0] / f);
      if (ref.empty()) return {false, commands[c].args[0] + " wrote an empty " + f};
      for (std::size_t r = 1; r < dirs.size(); ++r) {
        if (slurp(dirs[r] / f) != ref) return {false, commands[c].args[0] + ": " + f + " differs"};
      }
      ++compared;
    }
    for (const auto& dir : dirs) {
      const auto kv = je::io::parse_key_values(slurp(dir / "metrics.txt"), "metrics");
      audit.max_increase = std::max(audit.max_increase, std::stod(kv.at("max_trace_increase")));
    }
  }
  je::parallel::set_workers(1);
  fs::remove_all(root);
  return {true, fmt("%.0f output files byte-identical across repeat runs and 1 vs 4 workers", static_cast<double>(compared))};
}

}  // namespace

int main() {
  criterion(1, 10, single_graph_ase);
  criterion(2, 10, shared_closed_form);
  criterion(3, 30, gradient_check);
  criterion(5, 120, tiny_oracle);
  criterion(6, 30, universal_construction);
  criterion(7, 600, bias_reproduction);
  criterion(8, 600, classify_reproduction);
  criterion(9, 180, bound_reproduction);
  criterion(10, 0, determinism);
  criterion(4, 0, [] {
    return Outcome{audit.max_increase <= 1e-12,
                   fmt("%.0f solver runs, largest single-step trace increase %.3e", static_cast<double>(audit.runs),
                       audit.max_increase)};
  });
  std::printf("%d criteria failed\n", failures);
  return failures;
}
