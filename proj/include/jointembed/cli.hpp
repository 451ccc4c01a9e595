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

#ifndef JOINTEMBED_CLI_HPP
#define JOINTEMBED_CLI_HPP

#include <charconv>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "jointembed/embed.hpp"
#include "jointembed/error.hpp"
#include "jointembed/experiments.hpp"
#include "jointembed/graph.hpp"
#include "jointembed/inference.hpp"
#include "jointembed/io.hpp"
#include "jointembed/models.hpp"
#include "jointembed/parallel.hpp"

namespace jointembed::cli {

enum ExitCode : int { ok = 0, usage = 2, data = 3, numeric = 4 };

/// Files written by one command. Unless commit() is called, the destructor
/// removes them, and the directory too when this object created it.
class OutputDir {
 public:
  explicit OutputDir(std::filesystem::path dir) : dir_(std::move(dir)) {
    namespace fs = std::filesystem;
    if (dir_.empty()) throw UsageError("--out is required");
    if (fs::exists(dir_)) {
      if (!fs::is_directory(dir_)) throw DataError(dir_.string() + " exists and is not a directory");
    } else {
      std::error_code ec;
      fs::create_directories(dir_, ec);
      if (ec) throw DataError("cannot create " + dir_.string() + ": " + ec.message());
      created_ = true;
    }
  }
  OutputDir(const OutputDir&) = delete;
  OutputDir& operator=(const OutputDir&) = delete;

  ~OutputDir() {
    if (committed_) return;
    std::error_code ec;
    if (created_) {
      std::filesystem::remove_all(dir_, ec);
      return;
    }
    for (const auto& p : written_) std::filesystem::remove(p, ec);
  }

  void write(const std::string& name, std::string_view text) {
    const auto path = dir_ / name;
    written_.push_back(path);
    write_text_file(path, text);
  }

  void commit() { committed_ = true; }

 private:
  std::filesystem::path dir_;
  bool created_ = false;
  bool committed_ = false;
  std::vector<std::filesystem::path> written_;
};

namespace detail {

inline std::filesystem::path resolve(const std::filesystem::path& base, const std::string& value) {
  std::filesystem::path p = value;
  return p.is_relative() ? base / p : p;
}

inline bool parse_bool(const std::string& v, const std::string& key) {
  if (v == "1" || v == "true") return true;
  if (v == "0" || v == "false") return false;
  throw DataError("model spec: " + key + " must be 0/1 or true/false");
}

struct SampledSet {
  GraphSet graphs;
  std::optional<Matrix> lambdas;
};

/**
 * Model specification file (key=value):
 *   kind=er     n, p, loops
 *   kind=sbm    block_probs (CSV), tau (comma list) or pi (comma list) with n
 *   kind=rdpg   positions (CSV, n x d)
 *   kind=mreg   components (CSV, n x d), loadings=uniform|mixture|fixed,
 *               lo/hi (comma lists) | atoms (CSV) + weights | list (CSV),
 *               loops, policy=reject|clamp
 * Paths are relative to the spec file.
 */
inline SampledSet sample_from_spec(const std::filesystem::path& spec_path, std::size_t m, std::uint64_t seed) {
  const auto kv = io::parse_key_values(read_text_file(spec_path), spec_path.string());
  const auto base = spec_path.parent_path();
  auto get = [&](const std::string& key) -> const std::string& {
    const auto it = kv.find(key);
    if (it == kv.end()) throw DataError("model spec: missing key '" + key + "'");
    return it->second;
  };
  auto allow = [&](std::set<std::string> keys) {
    keys.insert("kind");
    for (const auto& [k, v] : kv)
      if (!keys.count(k)) throw DataError("model spec: unknown key '" + k + "'");
  };
  auto count = [&](const std::string& key) {
    const double v = io::parse_real(get(key), "model spec " + key);
    if (v < 1 || v != std::floor(v)) throw DataError("model spec: " + key + " must be a positive integer");
    return static_cast<std::size_t>(v);
  };
  const std::string kind = get("kind");

  if (kind == "er") {
    allow({"n", "p", "loops"});
    const std::size_t n = count("n");
    const double p = io::parse_real(get("p"), "model spec p");
    if (!(p >= 0.0 && p <= 1.0)) throw DataError("model spec: p must lie in [0,1]");
    const bool loops = kv.count("loops") ? parse_bool(kv.at("loops"), "loops") : false;
    models::MregModel model;
    model.components = Vector::Constant(static_cast<Eigen::Index>(n), 1.0 / std::sqrt(static_cast<double>(n)));
    const Vector lambda = Vector::Constant(1, static_cast<double>(n) * p);
    model.loadings = models::UniformBox{lambda, lambda};
    return {models::sample_mreg(model, m, seed, loops).graphs, std::nullopt};
  }
  if (kind == "sbm") {
    allow({"block_probs", "tau", "pi", "n"});
    models::SbmParams params;
    params.block_probs = io::read_matrix_csv(resolve(base, get("block_probs")));
    if (kv.count("tau") == kv.count("pi")) throw DataError("model spec: give exactly one of tau and pi");
    if (kv.count("tau")) {
      std::vector<std::size_t> tau;
      for (double b : io::parse_real_list(kv.at("tau"), "model spec tau")) {
        if (b < 0 || b != std::floor(b)) throw DataError("model spec: tau entries must be block ids");
        tau.push_back(static_cast<std::size_t>(b));
      }
      params.membership = std::move(tau);
    } else {
      params.membership = io::parse_real_list(kv.at("pi"), "model spec pi");
      params.n = count("n");
    }
    return {models::sample_sbm(params, m, seed).graphs, std::nullopt};
  }
  if (kind == "rdpg") {
    allow({"positions"});
    models::RdpgParams params{io::read_matrix_csv(resolve(base, get("positions")))};
    return {models::sample_rdpg(params, m, seed), std::nullopt};
  }
  if (kind == "mreg") {
    allow({"components", "loadings", "lo", "hi", "atoms", "weights", "list", "loops", "policy"});
    models::MregModel model;
    model.components = io::read_matrix_csv(resolve(base, get("components")));
    const std::string& dist = get("loadings");
    if (dist == "uniform") {
      model.loadings = models::UniformBox{io::to_vector(io::parse_real_list(get("lo"), "model spec lo")),
                                          io::to_vector(io::parse_real_list(get("hi"), "model spec hi"))};
    } else if (dist == "mixture") {
      const Matrix atoms = io::read_matrix_csv(resolve(base, get("atoms")));
      models::PointMassMixture mix;
      for (Eigen::Index r = 0; r < atoms.rows(); ++r) mix.atoms.push_back(atoms.row(r).transpose());
      mix.weights = io::parse_real_list(get("weights"), "model spec weights");
      model.loadings = std::move(mix);
    } else if (dist == "fixed") {
      const Matrix list = io::read_matrix_csv(resolve(base, get("list")));
      models::FixedList fixed;
      for (Eigen::Index r = 0; r < list.rows(); ++r) fixed.loadings.push_back(list.row(r).transpose());
      model.loadings = std::move(fixed);
    } else {
      throw DataError("model spec: loadings must be uniform, mixture or fixed");
    }
    const bool loops = kv.count("loops") ? parse_bool(kv.at("loops"), "loops") : false;
    auto policy = models::ProbabilityPolicy::reject;
    if (kv.count("policy")) {
      if (kv.at("policy") == "clamp") {
        policy = models::ProbabilityPolicy::clamp;
      } else if (kv.at("policy") != "reject") {
        throw DataError("model spec: policy must be reject or clamp");
      }
    }
    auto sample = models::sample_mreg(model, m, seed, loops, policy);
    Matrix lambdas(m, model.dimension());
    for (std::size_t i = 0; i < m; ++i) lambdas.row(static_cast<Eigen::Index>(i)) = sample.lambdas[i].transpose();
    std::optional<std::vector<int>> labels;
    if (std::holds_alternative<models::PointMassMixture>(model.loadings)) {
      labels.emplace();
      for (auto c : sample.components) labels->push_back(static_cast<int>(c) + 1);
    }
    GraphSet gs = labels ? sample.graphs.with_labels(std::move(*labels)) : std::move(sample.graphs);
    return {std::move(gs), std::move(lambdas)};
  }
  throw DataError("model spec: kind must be er, sbm, rdpg or mreg");
}

inline std::string graph_file_name(std::size_t i, std::size_t m) {
  std::string digits = std::to_string(i);
  const std::size_t width = std::max<std::size_t>(4, std::to_string(m - 1).size());
  return "graph_" + std::string(width - digits.size(), '0') + digits + ".txt";
}

inline std::string trace_csv(const EmbedResult& res) {
  std::string out = "dim,iter,objective\n";
  for (std::size_t k = 0; k < res.inner_traces.size(); ++k) {
    for (std::size_t t = 0; t < res.inner_traces[k].size(); ++t) {
      out += std::to_string(k + 1) + ',' + std::to_string(t) + ',' +
             jointembed::detail::format_double(res.inner_traces[k][t]) + '\n';
    }
  }
  return out;
}

inline std::string scree_csv(const EmbedResult& res) {
  std::string out = "dim,objective,mean_abs_loading\n";
  for (const auto& row : scree(res)) {
    out += std::to_string(row.k) + ',' + jointembed::detail::format_double(row.objective) + ',' +
           jointembed::detail::format_double(row.mean_abs_loading) + '\n';
  }
  return out;
}

inline std::vector<std::size_t> parse_count_list(const std::string& text, const std::string& what) {
  std::vector<std::size_t> out;
  for (const auto& tok : io::split(text, ',')) {
    std::size_t v = 0;
    const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || ptr != tok.data() + tok.size()) throw UsageError(what + ": cannot parse '" + tok + "'");
    out.push_back(v);
  }
  return out;
}

// Command settings, bound to CLI11 options.
struct Settings {
  std::optional<std::uint64_t> seed;
  std::string out;
  int threads = 1;
  std::string model, manifest, components, truth;
  std::size_t m = 0;
  std::size_t d = 0;
  std::size_t clusters = 2;
  std::string variant = "free";
  std::string init = "mean";
  std::string mode = "greedy";
  double outer_tol = 1e-7;
  std::size_t max_inner_iter = 500;
  std::size_t restarts = 0;
  std::size_t reps = 5;
  std::size_t m_max = 4096;
  std::string m_list = "4,10,20,50,100,200";
  bool shuffle_labels = false;
  std::size_t n = 100;
  std::size_t bound_m = 1024;
  double p = 0.5;
};

inline std::uint64_t need_seed(const Settings& s, const std::string& command) {
  if (!s.seed) throw UsageError(command + ": --seed is required");
  return *s.seed;
}

inline EmbedConfig embed_config(const Settings& s) {
  EmbedConfig cfg;
  cfg.d = s.d;
  cfg.outer_tol = s.outer_tol;
  cfg.max_inner_iter = s.max_inner_iter;
  cfg.restarts = s.restarts;
  if (s.init == "random") {
    cfg.init = InitMethod::random;
  } else if (s.init != "mean") {
    throw UsageError("--init must be mean or random");
  }
  if ((cfg.restarts > 0 || cfg.init == InitMethod::random) && !s.seed) {
    throw UsageError("embed: --seed is required with random starts");
  }
  cfg.seed = s.seed.value_or(0);
  cfg.validate();
  return cfg;
}

// ---------------------------------------------------------------------------
// Commands. Each computes everything before touching the output directory.

inline void cmd_sample(const Settings& s, std::ostream& out) {
  const std::uint64_t seed = need_seed(s, "sample");
  if (s.m < 1) throw UsageError("sample: --m must be >= 1");
  if (s.model.empty()) throw UsageError("sample: --model is required");
  const auto sampled = sample_from_spec(s.model, s.m, seed);
  std::vector<std::string> files;
  std::string manifest;
  for (std::size_t i = 0; i < s.m; ++i) {
    files.push_back(graph_file_name(i, s.m));
    manifest += files.back();
    if (sampled.graphs.labels()) manifest += '\t' + std::to_string((*sampled.graphs.labels())[i]);
    manifest += '\n';
  }
  OutputDir dir(s.out);
  for (std::size_t i = 0; i < s.m; ++i) dir.write(files[i], serialize_graph(sampled.graphs[i]));
  dir.write("manifest.tsv", manifest);
  if (sampled.lambdas) dir.write("lambdas.csv", io::format_table(*sampled.lambdas, "graph_id", "l"));
  dir.commit();
  out << "graphs=" << s.m << "\nvertices=" << sampled.graphs.vertex_count() << '\n';
}

inline void cmd_embed(const Settings& s, std::ostream& out) {
  const EmbedConfig cfg = embed_config(s);
  if (s.manifest.empty()) throw UsageError("embed: --manifest is required");
  const GraphSet gs = read_manifest(s.manifest);
  EmbedResult res;
  if (s.variant == "free") {
    res = joint_embed(gs, cfg);
  } else if (s.variant == "classwise") {
    res = joint_embed_classwise(gs, cfg);
  } else if (s.variant == "nonneg") {
    res = joint_embed_nonneg(gs, cfg);
  } else {
    throw UsageError("--variant must be free, classwise or nonneg");
  }
  io::Metrics metrics;
  metrics.add("graphs", static_cast<double>(gs.size()));
  metrics.add("dimension", static_cast<double>(cfg.d));
  metrics.add("objective", res.objective_per_dim.back());
  bool converged = true;
  for (bool c : res.converged) converged = converged && c;
  metrics.add("converged", converged ? "1" : "0");
  metrics.add("max_trace_increase", res.max_trace_increase());
  for (std::size_t w = 0; w < res.warnings.size(); ++w) metrics.add("warning" + std::to_string(w + 1), res.warnings[w]);

  OutputDir dir(s.out);
  dir.write("lambda.csv", io::format_table(res.loadings, "graph_id", "l"));
  dir.write("h.csv", io::format_table(res.components, "vertex_id", "h"));
  dir.write("trace.csv", trace_csv(res));
  dir.write("scree.csv", scree_csv(res));
  dir.write("metrics.txt", metrics.str());
  dir.commit();
  out << metrics.str();
}

inline void cmd_project(const Settings& s, std::ostream& out) {
  if (s.manifest.empty() || s.components.empty()) throw UsageError("project: --manifest and --components are required");
  ProjectionMode mode = ProjectionMode::greedy;
  if (s.mode == "joint") {
    mode = ProjectionMode::joint;
  } else if (s.mode != "greedy") {
    throw UsageError("--mode must be greedy or joint");
  }
  const GraphSet gs = read_manifest(s.manifest);
  const Matrix h = io::read_table_csv(s.components);
  Matrix loadings(gs.size(), h.cols());
  for (std::size_t i = 0; i < gs.size(); ++i) {
    loadings.row(static_cast<Eigen::Index>(i)) = project_graph(gs[i], h, mode).transpose();
  }
  OutputDir dir(s.out);
  dir.write("lambda.csv", io::format_table(loadings, "graph_id", "l"));
  dir.commit();
  out << "graphs=" << gs.size() << '\n';
}

inline void cmd_cluster(const Settings& s, std::ostream& out) {
  const std::uint64_t seed = need_seed(s, "cluster");
  if (s.manifest.empty()) throw UsageError("cluster: --manifest is required");
  const EmbedConfig cfg = embed_config(s);
  if (s.clusters < 1) throw UsageError("cluster: --K must be >= 1");
  const GraphSet gs = read_manifest(s.manifest);
  const std::size_t n = gs.vertex_count();
  if (s.clusters > n) throw UsageError("cluster: --K exceeds the vertex count");
  std::optional<Matrix> truth;
  if (!s.truth.empty()) {
    truth = io::read_matrix_csv(s.truth);
    if (static_cast<std::size_t>(truth->cols()) != n || (truth->rows() != 1 && static_cast<std::size_t>(truth->rows()) != gs.size())) {
      throw DataError("cluster: truth needs n columns and 1 or m rows");
    }
  }
  const auto res = joint_embed(gs, cfg);
  std::vector<std::vector<int>> labels(gs.size());
  parallel::for_each_index(gs.size(), [&](std::size_t i) {
    const Matrix x = latent_positions(res, i, NegativeLoadingPolicy::signed_sqrt, true);
    labels[i] = inference::kmeans(x, s.clusters, rng::derive(seed, i)).labels;
  });
  io::Metrics metrics;
  std::string csv = "graph_id,vertex_id,cluster\n";
  double ari_sum = 0.0;
  double purity_sum = 0.0;
  for (std::size_t i = 0; i < gs.size(); ++i) {
    for (std::size_t v = 0; v < n; ++v) csv += std::to_string(i) + ',' + std::to_string(v) + ',' + std::to_string(labels[i][v]) + '\n';
    if (truth) {
      const auto row = truth->row(truth->rows() == 1 ? 0 : static_cast<Eigen::Index>(i));
      std::vector<int> t(n);
      for (std::size_t v = 0; v < n; ++v) t[v] = static_cast<int>(row[static_cast<Eigen::Index>(v)]);
      ari_sum += inference::ari(labels[i], t);
      purity_sum += inference::purity(labels[i], t);
    }
  }
  if (truth) {
    metrics.add("ari", ari_sum / static_cast<double>(gs.size()));
    metrics.add("purity", purity_sum / static_cast<double>(gs.size()));
  }
  metrics.add("graphs", static_cast<double>(gs.size()));
  OutputDir dir(s.out);
  dir.write("labels.csv", csv);
  dir.write("metrics.txt", metrics.str());
  dir.commit();
  out << metrics.str();
}

inline void cmd_experiment_bias(const Settings& s, std::ostream& out) {
  const std::uint64_t seed = need_seed(s, "experiment-bias");
  if (s.out.empty()) throw UsageError("experiment-bias: --out is required");
  const auto exp = experiments::run_bias(s.reps, s.m_max, seed);
  io::Metrics metrics;
  for (std::size_t k = 1; k <= 3; ++k) {
    metrics.add("bias_k" + std::to_string(k), exp.mean(s.m_max, k));
    if (s.m_max > 16) metrics.add("delta_k" + std::to_string(k), exp.mean(s.m_max, k, true));
  }
  metrics.add("solver_runs", static_cast<double>(exp.audit.runs));
  metrics.add("max_trace_increase", exp.audit.max_increase);
  OutputDir dir(s.out);
  dir.write("bias_curves.csv", exp.csv());
  dir.write("metrics.txt", metrics.str());
  dir.commit();
  out << metrics.str();
}

inline void cmd_experiment_classify(const Settings& s, std::ostream& out) {
  const std::uint64_t seed = need_seed(s, "experiment-classify");
  if (s.out.empty()) throw UsageError("experiment-classify: --out is required");
  const auto m_list = parse_count_list(s.m_list, "--m-list");
  experiments::ClassifyOptions opt;
  opt.shuffle_labels = s.shuffle_labels;
  const auto exp = experiments::run_classify(m_list, s.reps, seed, opt);
  io::Metrics metrics;
  for (std::size_t m : m_list)
    for (const auto& method : experiments::classify_methods())
      metrics.add("accuracy_" + method + "_m" + std::to_string(m), exp.mean(method, m));
  metrics.add("solver_runs", static_cast<double>(exp.audit.runs));
  metrics.add("max_trace_increase", exp.audit.max_increase);
  OutputDir dir(s.out);
  dir.write("accuracy.csv", exp.csv());
  dir.write("metrics.txt", metrics.str());
  dir.commit();
  out << metrics.str();
}

inline void cmd_bound_check(const Settings& s, std::ostream& out) {
  const std::uint64_t seed = need_seed(s, "bound-check");
  const auto res = experiments::run_bound_check(s.n, s.p, s.bound_m, seed);
  io::Metrics metrics;
  metrics.add("error", res.error);
  metrics.add("overlap", res.overlap);
  metrics.add("e_lambda", res.e_lambda);
  metrics.add("e_lambda_sq", res.e_lambda_sq);
  metrics.add("bound", res.bound);
  metrics.add("within_bound", res.within_bound() ? "1" : "0");
  metrics.add("max_trace_increase", res.audit.max_increase);
  if (!s.out.empty()) {
    OutputDir dir(s.out);
    dir.write("metrics.txt", metrics.str());
    dir.commit();
  }
  out << metrics.str();
}

}  // namespace detail

/// Runs one command line (args[0] is the program name). Returns the exit code.
inline int run(const std::vector<std::string>& args, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  detail::Settings s;
  CLI::App app{"Joint embedding of multiple graphs", "jointembed"};
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  std::string config;

  auto common = [&](CLI::App* sub, bool seeded) {
    sub->add_option("--out", s.out, "Output directory");
    sub->add_option("--config", config, "key=value file with option defaults");
    sub->add_option("--threads", s.threads, "Worker threads")->check(CLI::PositiveNumber);
    if (seeded) sub->add_option("--seed", s.seed, "Random seed");
  };
  auto embed_opts = [&](CLI::App* sub) {
    sub->add_option("--d", s.d, "Embedding dimension")->required();
    sub->add_option("--outer-tol", s.outer_tol, "Relative objective decrease to stop");
    sub->add_option("--max-inner-iter", s.max_inner_iter, "Iteration cap per dimension");
    sub->add_option("--restarts", s.restarts, "Extra random starts per dimension");
    sub->add_option("--init", s.init, "Initialization: mean or random");
  };

  auto* sample = app.add_subcommand("sample", "Sample graphs from a model specification");
  common(sample, true);
  sample->add_option("--model", s.model, "Model specification file");
  sample->add_option("--m", s.m, "Number of graphs");

  auto* embed = app.add_subcommand("embed", "Jointly embed the graphs of a manifest");
  common(embed, true);
  embed->add_option("--manifest", s.manifest, "Manifest file");
  embed_opts(embed);
  embed->add_option("--variant", s.variant, "free, classwise or nonneg");

  auto* project = app.add_subcommand("project", "Loadings of new graphs on fitted components");
  common(project, false);
  project->add_option("--manifest", s.manifest, "Manifest file");
  project->add_option("--components", s.components, "h.csv from embed");
  project->add_option("--mode", s.mode, "greedy or joint");

  auto* cluster = app.add_subcommand("cluster", "k-means on per-graph latent positions");
  common(cluster, true);
  cluster->add_option("--manifest", s.manifest, "Manifest file");
  embed_opts(cluster);
  cluster->add_option("--K", s.clusters, "Number of clusters");
  cluster->add_option("--truth", s.truth, "CSV of true vertex labels (1 or m rows)");

  auto* bias = app.add_subcommand("experiment-bias", "Bias and convergence as m doubles");
  common(bias, true);
  bias->add_option("--reps", s.reps, "Replicates");
  bias->add_option("--m-max", s.m_max, "Largest m (power of 2)");

  auto* classify = app.add_subcommand("experiment-classify", "1-NN accuracy of JE and baselines");
  common(classify, true);
  classify->add_option("--m-list", s.m_list, "Comma separated even graph counts");
  classify->add_option("--reps", s.reps, "Replicates");
  classify->add_flag("--shuffle-labels", s.shuffle_labels, "Permute labels (chance control)");

  auto* bound = app.add_subcommand("bound-check", "Empirical bias against the population bound");
  common(bound, true);
  bound->add_option("--n", s.n, "Vertices");
  bound->add_option("--p", s.p, "Edge probability");
  bound->add_option("--m", s.bound_m, "Number of graphs");

  std::vector<std::string> argv_store = args;
  try {
    // Config entries become leading options so explicit flags override them.
    CLI::App* active = nullptr;
    if (argv_store.size() > 1) {
      for (auto* sub : app.get_subcommands([](CLI::App*) { return true; }))
        if (sub->get_name() == argv_store[1]) active = sub;
    }
    if (active) {
      std::optional<std::string> config_path;
      for (std::size_t i = 2; i < argv_store.size(); ++i) {
        if (argv_store[i] == "--config" && i + 1 < argv_store.size()) config_path = argv_store[i + 1];
        if (argv_store[i].rfind("--config=", 0) == 0) config_path = argv_store[i].substr(9);
      }
      if (config_path) {
        const auto kv = io::parse_key_values(read_text_file(*config_path), *config_path);
        std::vector<std::string> injected;
        for (const auto& [key, value] : kv) {
          if (key == "config" || active->get_option_no_throw("--" + key) == nullptr) {
            throw UsageError(*config_path + ": unknown key '" + key + "'");
          }
          injected.push_back("--" + key + "=" + value);
        }
        argv_store.insert(argv_store.begin() + 2, injected.begin(), injected.end());
      }
    }
    std::vector<const char*> argv;
    for (const auto& a : argv_store) argv.push_back(a.c_str());
    app.parse(static_cast<int>(argv.size()), argv.data());
    parallel::set_workers(s.threads);

    if (sample->parsed()) detail::cmd_sample(s, out);
    else if (embed->parsed()) detail::cmd_embed(s, out);
    else if (project->parsed()) detail::cmd_project(s, out);
    else if (cluster->parsed()) detail::cmd_cluster(s, out);
    else if (bias->parsed()) detail::cmd_experiment_bias(s, out);
    else if (classify->parsed()) detail::cmd_experiment_classify(s, out);
    else if (bound->parsed()) detail::cmd_bound_check(s, out);
    return ok;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      app.exit(e, out, err);
      return ok;
    }
    err << "error: " << e.what() << '\n';
    return usage;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return usage;
  } catch (const DataError& e) {
    err << "error: " << e.what() << '\n';
    return data;
  } catch (const NumericError& e) {
    err << "error: " << e.what() << '\n';
    return numeric;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return data;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return numeric;
  }
}

}  // namespace jointembed::cli

#endif  // JOINTEMBED_CLI_HPP
