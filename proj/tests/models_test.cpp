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

#include <gtest/gtest.h>

#include "jointembed/models.hpp"
#include "support.hpp"

namespace jointembed::models {
namespace {

MregModel constant_model(std::size_t n, double lambda) {
  MregModel m;
  m.components = Vector::Constant(static_cast<Eigen::Index>(n), 1.0 / std::sqrt(static_cast<double>(n)));
  m.loadings = UniformBox{Vector::Constant(1, lambda), Vector::Constant(1, lambda)};
  return m;
}

TEST(EdgeProb, HalfEverywhere) {
  const Matrix p = edge_prob_matrix(constant_model(100, 50.0), Vector::Constant(1, 50.0));
  EXPECT_LE((p.array() - 0.5).abs().maxCoeff(), 1e-15);
}

TEST(EdgeProb, ZeroLoading) {
  const auto model = classify_study_model();
  EXPECT_EQ(edge_prob_matrix(model, Vector::Zero(2)), Matrix::Zero(100, 100));
}

TEST(EdgeProb, ClassifyModelIsTwoBlock) {
  Vector l(2);
  l << 25, 5;
  const Matrix p = edge_prob_matrix(classify_study_model(), l);
  EXPECT_NEAR(p(0, 1), 0.3, 1e-12);
  EXPECT_NEAR(p(60, 99), 0.3, 1e-12);
  EXPECT_NEAR(p(0, 99), 0.2, 1e-12);
  EXPECT_EQ(p, p.transpose());
}

TEST(EdgeProb, RejectsOutOfRangeUnlessClamped) {
  const auto model = constant_model(4, 8.0);
  EXPECT_THROW(edge_prob_matrix(model, Vector::Constant(1, 8.0)), DataError);
  const Matrix p = edge_prob_matrix(model, Vector::Constant(1, 8.0), ProbabilityPolicy::clamp);
  EXPECT_EQ(p, Matrix::Ones(4, 4));
}

TEST(MregModelTest, Validation) {
  MregModel m = constant_model(4, 1.0);
  m.components *= 1.01;
  EXPECT_THROW(m.validate(), DataError);
  MregModel dup;
  dup.components = Matrix(3, 2);
  dup.components.col(0) = Vector::Constant(3, 1.0 / std::sqrt(3.0));
  dup.components.col(1) = -dup.components.col(0);
  dup.loadings = UniformBox{Vector::Zero(2), Vector::Ones(2)};
  EXPECT_THROW(dup.validate(), DataError);
  PointMassMixture bad{{Vector::Ones(1), Vector::Ones(1)}, {0.5, 0.6}};
  EXPECT_THROW(validate(LoadingDistribution{bad}, 1), DataError);
  UniformBox box{Vector::Ones(1), Vector::Zero(1)};
  EXPECT_THROW(validate(LoadingDistribution{box}, 1), DataError);
}

TEST(SampleMreg, DegenerateProbabilities) {
  const auto full = sample_mreg(constant_model(5, 5.0), 3, 1, true);
  for (const Graph& g : full.graphs.graphs()) EXPECT_EQ(g.to_dense(), Matrix::Ones(5, 5));
  const auto no_loops = sample_mreg(constant_model(5, 5.0), 3, 1, false);
  for (const Graph& g : no_loops.graphs.graphs()) EXPECT_EQ(g.to_dense(), Matrix::Ones(5, 5) - Matrix::Identity(5, 5));
  const auto empty = sample_mreg(constant_model(5, 0.0), 3, 1, true);
  for (const Graph& g : empty.graphs.graphs()) EXPECT_EQ(g.squared_norm(), 0.0);
}

TEST(SampleMreg, Reproducible) {
  const auto model = classify_study_model();
  const auto a = sample_mreg(model, 6, 42, false);
  const auto b = sample_mreg(model, 6, 42, false);
  const auto c = sample_mreg(model, 6, 43, false);
  bool differs = false;
  for (std::size_t i = 0; i < 6; ++i) {
    EXPECT_EQ(serialize_graph(a.graphs[i]), serialize_graph(b.graphs[i]));
    differs = differs || serialize_graph(a.graphs[i]) != serialize_graph(c.graphs[i]);
  }
  EXPECT_TRUE(differs);
}

TEST(SampleMreg, EdgeFrequenciesMatchMeanProbability) {
  const auto model = bias_study_model();
  const std::size_t m = 4096;
  const auto sample = sample_mreg(model, m, 5, true, ProbabilityPolicy::clamp);
  Matrix freq = Matrix::Zero(20, 20);
  Matrix mean_p = Matrix::Zero(20, 20);
  for (std::size_t i = 0; i < m; ++i) {
    freq += sample.graphs[i].to_dense();
    mean_p += edge_prob_matrix(model, sample.lambdas[i], ProbabilityPolicy::clamp);
  }
  freq /= static_cast<double>(m);
  mean_p /= static_cast<double>(m);
  for (int s = 0; s < 20; ++s) {
    for (int t = s; t < 20; ++t) {
      const double se = std::sqrt(std::max(mean_p(s, t) * (1 - mean_p(s, t)), 1e-12) / static_cast<double>(m));
      EXPECT_LE(std::abs(freq(s, t) - mean_p(s, t)), 4.0 * se + 1e-12) << s << "," << t;
    }
  }
  for (const auto& l : sample.lambdas) {
    EXPECT_GE(l[0], 8.0);
    EXPECT_LT(l[0], 16.0);
    EXPECT_LT(l[1], 4.0);
    EXPECT_LT(l[2], 2.0);
  }
}

TEST(SampleMreg, IndependentGraphsUncorrelated) {
  const auto sample = sample_mreg(constant_model(10, 5.0), 2000, 11, false);
  // Pair graph 2j with 2j+1; correlation of edge (0,1) indicators.
  double sx = 0, sy = 0, sxy = 0, sxx = 0, syy = 0;
  const double pairs = 1000;
  for (std::size_t j = 0; j < 1000; ++j) {
    const double x = sample.graphs[2 * j].at(0, 1);
    const double y = sample.graphs[2 * j + 1].at(0, 1);
    sx += x, sy += y, sxy += x * y, sxx += x * x, syy += y * y;
  }
  const double cov = sxy / pairs - sx * sy / pairs / pairs;
  const double corr = cov / std::sqrt((sxx / pairs - sx * sx / pairs / pairs) * (syy / pairs - sy * sy / pairs / pairs));
  EXPECT_LE(std::abs(corr), 0.1);
}

TEST(SampleSbm, OneBlockIsErdosRenyiAndZeroIsEmpty) {
  SbmParams p;
  p.membership = std::vector<std::size_t>(30, 0);
  p.block_probs = Matrix::Constant(1, 1, 0.0);
  for (const Graph& g : sample_sbm(p, 3, 1).graphs.graphs()) EXPECT_EQ(g.squared_norm(), 0.0);
  p.block_probs(0, 0) = 0.4;
  const auto s = sample_sbm(p, 50, 2);
  double edges = 0;
  for (const Graph& g : s.graphs.graphs()) {
    edges += g.squared_norm() / 2.0;
    for (std::size_t v = 0; v < 30; ++v) EXPECT_EQ(g.at(v, v), 0.0);
  }
  const double pairs = 50.0 * 30 * 29 / 2;
  EXPECT_NEAR(edges / pairs, 0.4, 4.0 * std::sqrt(0.24 / pairs));
}

TEST(SampleSbm, TwoBlockDensities) {
  SbmParams p;
  std::vector<std::size_t> tau(100);
  for (std::size_t v = 0; v < 100; ++v) tau[v] = v < 50 ? 0 : 1;
  p.membership = tau;
  p.block_probs = Matrix(2, 2);
  p.block_probs << 0.3, 0.2, 0.2, 0.3;
  const auto s = sample_sbm(p, 200, 3);
  double within = 0, between = 0;
  for (const Graph& g : s.graphs.graphs()) {
    for (const Entry& e : g.upper_entries()) (tau[e.row] == tau[e.col] ? within : between) += 1.0;
  }
  const double n_within = 200.0 * 2 * (50.0 * 49 / 2);
  const double n_between = 200.0 * 50 * 50;
  EXPECT_NEAR(within / n_within, 0.3, 4 * std::sqrt(0.21 / n_within));
  EXPECT_NEAR(between / n_between, 0.2, 4 * std::sqrt(0.16 / n_between));
}

TEST(SampleSbm, PriorFormAndValidation) {
  SbmParams p;
  p.membership = std::vector<double>{0.5, 0.5};
  p.n = 40;
  p.block_probs = Matrix(2, 2);
  p.block_probs << 0.5, 0.1, 0.1, 0.5;
  const auto s = sample_sbm(p, 4, 9);
  EXPECT_EQ(s.blocks.size(), 4u);
  EXPECT_EQ(s.blocks[0].size(), 40u);
  p.block_probs(0, 1) = 0.2;
  EXPECT_THROW(sample_sbm(p, 1, 1), DataError);
  p.block_probs(0, 1) = 0.1;
  p.membership = std::vector<double>{0.5, 0.6};
  EXPECT_THROW(sample_sbm(p, 1, 1), DataError);
}

TEST(SampleRdpg, ConstantPositionsAndZero) {
  RdpgParams zero{Matrix::Zero(10, 2)};
  for (const Graph& g : sample_rdpg(zero, 3, 1).graphs()) EXPECT_EQ(g.squared_norm(), 0.0);
  Matrix x = Matrix::Zero(40, 2);
  x.col(0).setConstant(std::sqrt(0.3));
  const auto gs = sample_rdpg({x}, 100, 2);
  double edges = 0;
  for (const Graph& g : gs.graphs()) edges += g.squared_norm() / 2.0;
  const double pairs = 100.0 * 40 * 39 / 2;
  EXPECT_NEAR(edges / pairs, 0.3, 4 * std::sqrt(0.21 / pairs));
  Matrix bad = Matrix::Ones(3, 2);
  EXPECT_THROW(sample_rdpg({bad}, 1, 1), DataError);
}

TEST(SampleRdpg, RandomPositionsDensities) {
  rng::Stream s(77);
  Matrix x(6, 2);
  for (Eigen::Index i = 0; i < 6; ++i) {
    const double r = std::sqrt(s.uniform(0.2, 0.9));
    const double a = s.uniform(0.0, 1.5);
    x(i, 0) = r * std::cos(a);
    x(i, 1) = r * std::sin(a);
  }
  const std::size_t m = 3000;
  const auto gs = sample_rdpg({x}, m, 3);
  const Matrix p = x * x.transpose();
  Matrix freq = Matrix::Zero(6, 6);
  for (const Graph& g : gs.graphs()) freq += g.to_dense();
  freq /= static_cast<double>(m);
  for (int i = 0; i < 6; ++i)
    for (int j = i + 1; j < 6; ++j)
      EXPECT_NEAR(freq(i, j), p(i, j), 4 * std::sqrt(p(i, j) * (1 - p(i, j)) / m) + 1e-12);
}

TEST(Universal, OneVertex) {
  const Graph one = Graph::dense(Matrix::Ones(1, 1), {false, true});
  const Graph zero = Graph::dense(Matrix::Zero(1, 1), {false, true});
  const auto u = universal_mreg({{zero, 0.5}, {one, 0.5}});
  EXPECT_EQ(u.model.components, Matrix::Ones(1, 1));
  EXPECT_NEAR(u.graph_loadings[1][0], 1.0, 1e-15);
  EXPECT_NEAR(u.graph_loadings[0][0], 0.0, 1e-15);
}

TEST(Universal, TwoVertexCoordinates) {
  Matrix a(2, 2);
  a << 1, 1, 1, 0;
  const Vector l = rank_one_coordinates(universal_basis(2), a);
  EXPECT_NEAR(l[0], 0.0, 1e-12);
  EXPECT_NEAR(l[1], -1.0, 1e-12);
  EXPECT_NEAR(l[2], 2.0, 1e-12);
}

TEST(Universal, ExactReconstructionForAllSmallGraphs) {
  for (std::size_t n = 1; n <= 3; ++n) {
    const auto graphs = enumerate_graphs(n);
    std::vector<std::pair<Graph, double>> probs;
    for (const auto& g : graphs) probs.emplace_back(g, 1.0 / static_cast<double>(graphs.size()));
    const auto u = universal_mreg(probs);
    EXPECT_LE(u.max_residual, 1e-10);
    EXPECT_EQ(u.model.dimension(), free_entries(n));
    for (std::size_t i = 0; i < graphs.size(); ++i) EXPECT_EQ(canonical_index(graphs[i]), i);
  }
}

TEST(Universal, RejectsBadInput) {
  auto graphs = enumerate_graphs(2);
  std::vector<std::pair<Graph, double>> probs;
  for (const auto& g : graphs) probs.emplace_back(g, 0.1);
  EXPECT_THROW(universal_mreg(probs), DataError);  // sums to 0.8
  probs.pop_back();
  EXPECT_THROW(universal_mreg(probs), DataError);  // incomplete
}

TEST(BiasBound, Examples) {
  EXPECT_NEAR(bias_bound(50, 2500, 1), 0.04, 1e-15);
  EXPECT_EQ(bias_bound(0, 1, 0.5), 0.0);
  EXPECT_NEAR(bias_bound(12, 448.0 / 3.0, 1), 0.16071428571428573, 1e-12);
  EXPECT_THROW(bias_bound(1, 1, 0), DataError);
  EXPECT_THROW(bias_bound(1, 0, 1), DataError);
}

}  // namespace
}  // namespace jointembed::models
