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

#include <Eigen/Eigenvalues>

#include "jointembed/numerics.hpp"
#include "support.hpp"

namespace jointembed::numerics {
namespace {

TEST(TopEigs, DiagonalPicksLargestMagnitude) {
  Matrix a = Matrix::Zero(3, 3);
  a.diagonal() << 3, -5, 1;
  const auto pairs = top_eigs(a, {1});
  ASSERT_EQ(pairs.size(), 1u);
  EXPECT_NEAR(pairs[0].value, -5.0, 1e-10);
  EXPECT_NEAR(pairs[0].vector[1], 1.0, 1e-10);
}

TEST(TopEigs, OnesMatrix) {
  const auto pairs = top_eigs(Matrix::Ones(6, 6), {1});
  EXPECT_NEAR(pairs[0].value, 6.0, 1e-10);
  EXPECT_LE((pairs[0].vector - Vector::Constant(6, 1.0 / std::sqrt(6.0))).norm(), 1e-10);
}

TEST(TopEigs, MatchesJacobiAndEigenReferences) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Matrix a = testing::random_symmetric(8, seed);
    const auto pairs = top_eigs(a, {4});
    const auto jac = jacobi_eigen(a);
    const auto order = order_by_magnitude(jac.values);
    const Eigen::SelfAdjointEigenSolver<Matrix> ref(a);
    Vector abs_ref = ref.eigenvalues().cwiseAbs();
    std::sort(abs_ref.data(), abs_ref.data() + abs_ref.size(), std::greater<>());
    for (std::size_t k = 0; k < 4; ++k) {
      EXPECT_NEAR(pairs[k].value, jac.values[order[k]], 1e-8);
      EXPECT_NEAR(std::abs(pairs[k].value), abs_ref[static_cast<Eigen::Index>(k)], 1e-8);
      EXPECT_NEAR(pairs[k].vector.norm(), 1.0, 1e-12);
      EXPECT_LE((a * pairs[k].vector - pairs[k].value * pairs[k].vector).norm(),
                1e-10 * std::max(1.0, std::abs(pairs[k].value)) * 1.0001);
      for (std::size_t l = 0; l < k; ++l) EXPECT_LE(std::abs(pairs[k].vector.dot(pairs[l].vector)), 1e-8);
    }
  }
}

TEST(TopEigs, SignConvention) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto pairs = top_eigs(testing::random_symmetric(10, seed), {3});
    for (const auto& p : pairs) {
      Eigen::Index idx = 0;
      p.vector.cwiseAbs().maxCoeff(&idx);
      EXPECT_GT(p.vector[idx], 0.0);
    }
  }
}

TEST(TopEigs, NonConvergenceReportsResidual) {
  const Matrix a = testing::random_symmetric(30, 7);
  try {
    top_eigs(a, {3, 1e-14, 1});
    FAIL() << "expected ConvergenceError";
  } catch (const ConvergenceError& e) {
    EXPECT_GT(e.best_residual(), 0.0);
  }
}

TEST(TopEigs, RejectsBadK) {
  EXPECT_THROW(top_eigs(Matrix::Identity(3, 3), {0}), UsageError);
  EXPECT_THROW(top_eigs(Matrix::Identity(3, 3), {4}), UsageError);
}

TEST(Armijo, HandEvaluatedSequence) {
  auto f = [](const Vector& x) { return x.squaredNorm(); };
  const Vector x = Vector::Ones(1);
  const Vector g = Vector::Constant(1, 2.0);
  const Vector dir = Vector::Constant(1, -2.0);
  const auto res = armijo_search(f, x, g, dir, ArmijoParams{});
  ASSERT_TRUE(res.accepted);
  EXPECT_EQ(res.step, 0.5);
  EXPECT_EQ(res.x[0], 0.0);
  EXPECT_EQ(res.evaluations, 2u);  // alpha = 1, alpha = 0.5
}

TEST(Armijo, LinearAcceptsInitialStep) {
  auto f = [](const Vector& x) { return -3.0 * x[0]; };
  const Vector g = Vector::Constant(1, -3.0);
  const auto res = armijo_search(f, Vector::Zero(1), g, -g, ArmijoParams{});
  EXPECT_TRUE(res.accepted);
  EXPECT_EQ(res.step, 1.0);
}

TEST(Armijo, StrictDescentOnQuadratic) {
  Matrix q(2, 2);
  q << 3, 1, 1, 2;
  auto f = [&](const Vector& x) { return 0.5 * x.dot(q * x); };
  Vector x(2);
  x << 1, -2;
  const Vector g = q * x;
  const auto res = armijo_search(f, x, g, -g, ArmijoParams{});
  EXPECT_LT(res.f, f(x));
}

TEST(Armijo, RejectsAscentDirection) {
  auto f = [](const Vector& x) { return x.squaredNorm(); };
  const Vector g = Vector::Constant(1, 2.0);
  EXPECT_THROW(armijo_search(f, Vector::Ones(1), g, g, ArmijoParams{}), UsageError);
}

TEST(Armijo, FailureReturnsInputPoint) {
  // Sphere retraction maps every candidate back to x itself.
  auto f = [](const Vector& x) { return x[0]; };
  const Vector x = Vector::Ones(1);
  const Vector g = Vector::Ones(1);
  ArmijoParams p;
  p.max_backtracks = 5;
  const auto res = armijo_search(f, x, g, Vector::Constant(1, -1e-3), p, SphereRetraction{});
  EXPECT_FALSE(res.accepted);
  EXPECT_EQ(res.x, x);
  EXPECT_EQ(res.f, 1.0);
}

TEST(Armijo, ParamsValidated) {
  ArmijoParams p;
  p.shrink = 1.0;
  EXPECT_THROW(p.validate(), UsageError);
  p = {};
  p.c1 = 0.0;
  EXPECT_THROW(p.validate(), UsageError);
}

TEST(Nnls, IdentityClamps) {
  Vector b(2);
  b << 1, -2;
  const Vector x = nnls(Matrix::Identity(2, 2), b);
  EXPECT_EQ(x[0], 1.0);
  EXPECT_EQ(x[1], 0.0);
}

TEST(Nnls, RecoversNonnegativeSolution) {
  const Matrix m = testing::random_symmetric(6, 4).leftCols(3);
  Vector x0(3);
  x0 << 0.5, 0.0, 2.0;
  EXPECT_LE((nnls(m, m * x0) - x0).norm(), 1e-8);
}

TEST(Nnls, BeatsProjectedUnconstrainedAndSatisfiesKkt) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const Matrix m = testing::random_symmetric(6, seed).leftCols(3);
    const Vector b = testing::random_unit(6, seed + 1000) * 3.0;
    const Vector x = nnls(m, b);
    EXPECT_GE(x.minCoeff(), 0.0);
    const Vector proj = m.colPivHouseholderQr().solve(b).cwiseMax(0.0);
    const double obj = (m * x - b).squaredNorm();
    EXPECT_LE(obj, (m * proj - b).squaredNorm() + 1e-12);
    EXPECT_LE(obj, b.squaredNorm() + 1e-12);
    const Vector grad = m.transpose() * (m * x - b);
    for (Eigen::Index i = 0; i < 3; ++i) {
      EXPECT_LE(std::abs(x[i] * grad[i]), 1e-6);
      EXPECT_GE(grad[i], -1e-8);
    }
    // Grid oracle over a coarse box around the solution.
    double best = obj;
    for (double a = 0; a <= 3.0; a += 0.05)
      for (double c = 0; c <= 3.0; c += 0.05)
        for (double e = 0; e <= 3.0; e += 0.05) {
          Vector y(3);
          y << a, c, e;
          best = std::min(best, (m * y - b).squaredNorm());
        }
    EXPECT_LE(obj, best + 1e-12);
  }
}

TEST(FiniteDiff, Examples) {
  auto sq = [](const Vector& x) { return x.squaredNorm(); };
  Vector x(2);
  x << 1, 2;
  const Vector g = finite_diff_grad(sq, x);
  EXPECT_NEAR(g[0], 2.0, 1e-6);
  EXPECT_NEAR(g[1], 4.0, 1e-6);
  EXPECT_EQ(finite_diff_grad([](const Vector&) { return 7.0; }, x), Vector::Zero(2));
}

}  // namespace
}  // namespace jointembed::numerics
