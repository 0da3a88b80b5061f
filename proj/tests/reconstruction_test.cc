// Copyright 2026 The mldp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include "mldp/reconstruction.h"

#include <cmath>
#include <memory>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "mldp/channel.h"
#include "mldp/distribution.h"
#include "mldp/metric_space.h"
#include "mldp/random.h"
#include "mldp/simd/kernels.h"
#include "testing/status_matchers.h"

namespace mldp {
namespace {

using ::mldp::testing::StatusIs;
using ::mldp::testing::V;
using ::testing::DoubleNear;
using ::testing::HasSubstr;
using ::testing::Pointwise;

std::shared_ptr<const MetricSpace> Discrete(size_t n) {
  return std::make_shared<const MetricSpace>(*MetricSpace::Discrete(n));
}

std::shared_ptr<const MetricSpace> Grid(size_t side) {
  GridSpec spec;
  spec.rows = spec.cols = side;
  spec.width_m = spec.height_m = 150.0 * side;
  return std::make_shared<const MetricSpace>(*BuildGrid(spec));
}

TEST(EmTest, IdentityChannelReturnsEmpiricalDistribution) {
  const Channel c = Channel::Identity(Discrete(4));
  const Histogram noisy(std::vector<uint64_t>{3, 0, 1, 4});
  ASSERT_OK_AND_ASSIGN(const EmResult r, EmReconstruct(c, noisy));
  EXPECT_THAT(V(r.estimate.probs()),
              Pointwise(DoubleNear(1e-15), {3.0 / 8, 0.0, 1.0 / 8, 4.0 / 8}));
  EXPECT_TRUE(r.converged);
  EXPECT_EQ(r.final_delta, 0.0);
  // One step reaches the fixed point, the next confirms it.
  EXPECT_EQ(r.iterations, 2);
}

TEST(EmTest, UniformChannelKeepsTheInitialPoint) {
  ASSERT_OK_AND_ASSIGN(const Channel c, BuildFlat(Discrete(3), 0.0));
  const Histogram noisy(std::vector<uint64_t>{10, 1, 0});
  ASSERT_OK_AND_ASSIGN(const EmResult r, EmReconstruct(c, noisy));
  EXPECT_THAT(V(r.estimate.probs()),
              Pointwise(DoubleNear(1e-15), {1.0 / 3, 1.0 / 3, 1.0 / 3}));
  ASSERT_OK_AND_ASSIGN(const Distribution init,
                       Distribution::Create({0.2, 0.3, 0.5}));
  ASSERT_OK_AND_ASSIGN(const EmResult r2, EmReconstruct(c, noisy, init));
  EXPECT_THAT(V(r2.estimate.probs()),
              Pointwise(DoubleNear(1e-15), {0.2, 0.3, 0.5}));
}

// Random row-stochastic matrix with a dominant diagonal, so it is invertible
// and well conditioned.
std::vector<double> RandomChannel(size_t n, Rng& rng) {
  std::vector<double> m(n * n);
  for (size_t x = 0; x < n; ++x) {
    double s = 0.0;
    for (size_t y = 0; y < n; ++y) {
      m[x * n + y] = 0.05 + rng.UniformDouble() + (x == y ? n : 0.0);
      s += m[x * n + y];
    }
    for (size_t y = 0; y < n; ++y) m[x * n + y] /= s;
  }
  return m;
}

TEST(EmTest, MatchesMatrixInversionOracle) {
  Rng rng(123);
  int checked = 0;
  for (int trial = 0; trial < 60; ++trial) {
    const size_t n = 3 + trial % 3;
    const std::vector<double> m = RandomChannel(n, rng);
    ASSERT_OK_AND_ASSIGN(const Channel c, Channel::FromMatrix(Discrete(n), m));
    // Counts from an interior truth.
    std::vector<double> truth(n);
    double s = 0.0;
    for (double& v : truth) s += (v = 0.2 + rng.UniformDouble());
    std::vector<uint64_t> counts(n);
    for (size_t y = 0; y < n; ++y) {
      double q = 0.0;
      for (size_t x = 0; x < n; ++x) q += truth[x] / s * m[x * n + y];
      counts[y] = static_cast<uint64_t>(std::llround(q * 1e5));
    }
    const Histogram noisy(counts);
    // Oracle: q = pi C, solved as C^T pi = q.
    Eigen::MatrixXd ct(n, n);
    Eigen::VectorXd q(n);
    for (size_t x = 0; x < n; ++x) {
      for (size_t y = 0; y < n; ++y) ct(y, x) = m[x * n + y];
    }
    for (size_t y = 0; y < n; ++y) {
      q(y) = static_cast<double>(counts[y]) / noisy.total();
    }
    const Eigen::VectorXd pi = ct.partialPivLu().solve(q);
    if (pi.minCoeff() <= 1e-3) continue;
    ++checked;
    ASSERT_OK_AND_ASSIGN(
        const EmResult r,
        EmReconstruct(c, noisy, std::nullopt,
                      {.l1_tol = 1e-14, .max_iter = 1000000}));
    double l1 = 0.0;
    for (size_t x = 0; x < n; ++x) l1 += std::abs(r.estimate[x] - pi(x));
    EXPECT_LT(l1, 1e-6) << "trial " << trial;
  }
  EXPECT_GE(checked, 40);
}

TEST(EmTest, LogLikelihoodNeverDecreases) {
  const auto space = Grid(8);
  ASSERT_OK_AND_ASSIGN(const Channel c, BuildGeometric(space, 0.006));
  Rng rng(5);
  const ChannelSampler sampler(c);
  Histogram noisy(c.size());
  for (int i = 0; i < 400; ++i) {
    noisy.Add(sampler.Sample(rng.UniformIndex(16) * 4, rng));
  }
  ASSERT_OK_AND_ASSIGN(const EmResult r,
                       EmReconstruct(c, noisy, std::nullopt,
                                     {.max_iter = 3000, .record_trace = true}));
  ASSERT_EQ(r.trace.size(), static_cast<size_t>(r.iterations) + 1);
  for (size_t i = 1; i < r.trace.size(); ++i) {
    EXPECT_GE(r.trace[i], r.trace[i - 1] - 1e-9) << "iteration " << i;
  }
  ASSERT_OK_AND_ASSIGN(const double ll, LogLikelihood(c, noisy, r.estimate));
  EXPECT_NEAR(ll, r.log_likelihood, 1e-8 * std::abs(ll));
  EXPECT_EQ(r.trace.back(), r.log_likelihood);
}

TEST(EmTest, ZerosInTheInitialPointStayZero) {
  ASSERT_OK_AND_ASSIGN(const Channel c, BuildFlat(Discrete(4), 1.0));
  ASSERT_OK_AND_ASSIGN(const Distribution init,
                       Distribution::Create({0.5, 0.0, 0.5, 0.0}));
  const Histogram noisy(std::vector<uint64_t>{1, 5, 2, 2});
  ASSERT_OK_AND_ASSIGN(const EmResult r, EmReconstruct(c, noisy, init));
  EXPECT_EQ(r.estimate[1], 0.0);
  EXPECT_EQ(r.estimate[3], 0.0);
}

TEST(EmTest, ConvergesToTheTruthWithManyReports) {
  const auto space = Grid(5);
  ASSERT_OK_AND_ASSIGN(const Channel c, BuildGeometric(space, 0.01));
  std::vector<double> truth(25, 0.0);
  truth[6] = 0.5;
  truth[12] = 0.3;
  truth[18] = 0.2;
  Rng rng(99);
  const ChannelSampler sampler(c);
  Histogram noisy(25);
  for (int i = 0; i < 400000; ++i) {
    const double u = rng.UniformDouble();
    const PointId x = u < 0.5 ? 6 : (u < 0.8 ? 12 : 18);
    noisy.Add(sampler.Sample(x, rng));
  }
  ASSERT_OK_AND_ASSIGN(const EmResult r, EmReconstruct(c, noisy));
  EXPECT_LT(L1Distance(r.estimate.probs(), truth), 0.05);
}

TEST(EmTest, IterationCapIsNotAnError) {
  ASSERT_OK_AND_ASSIGN(const Channel c, BuildGeometric(Grid(4), 0.005));
  Histogram noisy(16);
  noisy.Add(3, 4);
  noisy.Add(9, 1);
  ASSERT_OK_AND_ASSIGN(
      const EmResult r,
      EmReconstruct(c, noisy, std::nullopt, {.l1_tol = 0.0, .max_iter = 7}));
  EXPECT_EQ(r.iterations, 7);
  EXPECT_FALSE(r.converged);
  EXPECT_GT(r.final_delta, 0.0);
}

TEST(EmTest, Errors) {
  const Channel c = Channel::Identity(Discrete(3));
  EXPECT_THAT(EmReconstruct(c, Histogram(4)),
              StatusIs(absl::StatusCode::kInvalidArgument));
  EXPECT_THAT(EmReconstruct(c, Histogram(3)),
              StatusIs(absl::StatusCode::kFailedPrecondition,
                       HasSubstr("empty histogram")));
  EXPECT_THAT(EmReconstruct(c, Histogram(std::vector<uint64_t>{1, 1, 1}),
                            Distribution::Uniform(2)),
              StatusIs(absl::StatusCode::kInvalidArgument));
  // Output 1 is observed but unreachable from the support of the start.
  EXPECT_THAT(EmReconstruct(c, Histogram(std::vector<uint64_t>{1, 1, 0}),
                            Distribution::PointMass(3, 0)),
              StatusIs(absl::StatusCode::kFailedPrecondition,
                       HasSubstr("zero predicted mass")));
}

TEST(EmTest, LogLikelihoodOfImpossibleReportIsMinusInfinity) {
  const Channel c = Channel::Identity(Discrete(2));
  ASSERT_OK_AND_ASSIGN(
      const double ll,
      LogLikelihood(c, Histogram(std::vector<uint64_t>{1, 1}),
                    Distribution::PointMass(2, 0)));
  EXPECT_EQ(ll, -std::numeric_limits<double>::infinity());
}

TEST(EmTest, CsvRow) {
  const Channel c = Channel::Identity(Discrete(2));
  ASSERT_OK_AND_ASSIGN(
      const EmResult r,
      EmReconstruct(c, Histogram(std::vector<uint64_t>{1, 3})));
  EXPECT_EQ(r.CsvHeader(), "iterations,converged,final_delta,log_likelihood,p0,p1");
  EXPECT_EQ(r.ToCsvRow().substr(0, 6), "2,1,0,");
  EXPECT_THAT(r.ToCsvRow(), ::testing::EndsWith(",0.25,0.75"));
}

TEST(EmTest, ScalarAndVectorKernelsAgree) {
  if (!simd::Avx2Available()) GTEST_SKIP() << "no AVX2";
  const auto space = Grid(9);
  ASSERT_OK_AND_ASSIGN(const Channel c, BuildGeometric(space, 0.004));
  Rng rng(31);
  const ChannelSampler sampler(c);
  Histogram noisy(c.size());
  for (int i = 0; i < 300; ++i) noisy.Add(sampler.Sample(rng.UniformIndex(81), rng));
  simd::SetActive(simd::Isa::kScalar);
  ASSERT_OK_AND_ASSIGN(const EmResult scalar,
                       EmReconstruct(c, noisy, std::nullopt, {.max_iter = 500}));
  simd::SetActive(simd::Isa::kAvx2);
  ASSERT_OK_AND_ASSIGN(const EmResult vector,
                       EmReconstruct(c, noisy, std::nullopt, {.max_iter = 500}));
  EXPECT_LT(L1Distance(scalar.estimate.probs(), vector.estimate.probs()), 1e-9);
  EXPECT_EQ(scalar.iterations, vector.iterations);
}

}  // namespace
}  // namespace mldp
