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


#include "mldp/channel.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>
#include <numeric>
#include <vector>

#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "mldp/metric_space.h"
#include "mldp/random.h"
#include "testing/status_matchers.h"

namespace mldp {
namespace {

using ::mldp::testing::StatusIs;
using ::mldp::testing::V;
using ::testing::DoubleNear;
using ::testing::ElementsAre;
using ::testing::Pointwise;

std::shared_ptr<const MetricSpace> Share(MetricSpace space) {
  return std::make_shared<const MetricSpace>(std::move(space));
}

std::shared_ptr<const MetricSpace> Line(size_t n, double spacing = 1.0) {
  std::vector<PlanarPoint> points;
  for (size_t i = 0; i < n; ++i) points.push_back({spacing * i, 0.0});
  return Share(*MetricSpace::FromPoints(points));
}

GridSpec Grid(size_t rows, size_t cols, double cell = 150.0) {
  GridSpec spec;
  spec.rows = rows;
  spec.cols = cols;
  spec.width_m = cell * cols;
  spec.height_m = cell * rows;
  return spec;
}

void ExpectRowStochastic(const Channel& channel) {
  for (PointId x = 0; x < channel.size(); ++x) {
    double sum = 0.0;
    for (double p : channel.row(x)) {
      EXPECT_GE(p, 0.0);
      sum += p;
    }
    EXPECT_NEAR(sum, 1.0, 1e-12) << "row " << x;
  }
}

TEST(FlatTest, ThreePointExample) {
  ASSERT_OK_AND_ASSIGN(const Channel c, BuildFlat(Line(3), std::log(2.0)));
  EXPECT_THAT(V(c.row(0)), Pointwise(DoubleNear(1e-15), {0.5, 0.25, 0.25}));
  EXPECT_THAT(V(c.row(2)), Pointwise(DoubleNear(1e-15), {0.25, 0.25, 0.5}));
  EXPECT_EQ(c.mechanism(), Mechanism::kFlat);
}

TEST(FlatTest, ZeroEpsilonIsUniformAndHugeEpsilonIsIdentity) {
  ASSERT_OK_AND_ASSIGN(const Channel u, BuildFlat(Line(4), 0.0));
  EXPECT_THAT(V(u.row(1)), Pointwise(DoubleNear(1e-15), {.25, .25, .25, .25}));
  ASSERT_OK_AND_ASSIGN(const Channel id, BuildFlat(Line(4), 1e6));
  EXPECT_THAT(V(id.row(1)), ElementsAre(0.0, 1.0, 0.0, 0.0));
}

TEST(FlatTest, PaperGridDiagonal) {
  ASSERT_OK_AND_ASSIGN(MetricSpace grid, BuildGrid(GridSpec{}));
  const double eps = 8.24797;
  ASSERT_OK_AND_ASSIGN(const Channel c, BuildFlat(Share(std::move(grid)), eps));
  const double e = std::exp(eps);
  EXPECT_NEAR(c(17, 17), e / (899.0 + e), 1e-14);
  EXPECT_NEAR(c(17, 18), 1.0 / (899.0 + e), 1e-17);
  ExpectRowStochastic(c);
}

TEST(FlatTest, RejectsBadInput) {
  EXPECT_THAT(BuildFlat(Line(1), 1.0),
              StatusIs(absl::StatusCode::kInvalidArgument));
  EXPECT_THAT(BuildFlat(Line(3), -1.0),
              StatusIs(absl::StatusCode::kInvalidArgument));
  EXPECT_THAT(BuildFlat(Line(3), std::nan("")),
              StatusIs(absl::StatusCode::kInvalidArgument));
}

TEST(GeometricTest, ThreePointLine) {
  ASSERT_OK_AND_ASSIGN(const Channel c, BuildGeometric(Line(3), std::log(2.0)));
  EXPECT_THAT(V(c.row(0)),
              Pointwise(DoubleNear(1e-15), {4.0 / 7, 2.0 / 7, 1.0 / 7}));
  EXPECT_THAT(V(c.row(1)), Pointwise(DoubleNear(1e-15), {0.25, 0.5, 0.25}));
}

TEST(GeometricTest, RowsFollowDistanceRatio) {
  ASSERT_OK_AND_ASSIGN(MetricSpace grid, BuildGrid(Grid(6, 7)));
  const auto space = Share(std::move(grid));
  const double eps = 0.004;
  ASSERT_OK_AND_ASSIGN(const Channel c, BuildGeometric(space, eps));
  ExpectRowStochastic(c);
  for (PointId x = 0; x < c.size(); x += 5) {
    for (PointId y = 0; y < c.size(); ++y) {
      EXPECT_NEAR(std::log(c(x, y) / c(x, x)), -eps * space->distance(x, y),
                  1e-12);
    }
  }
}

TEST(LaplacianTest, ZeroEpsilonIsUniform) {
  const GridSpec spec = Grid(4, 5);
  ASSERT_OK_AND_ASSIGN(MetricSpace grid, BuildGrid(spec));
  ASSERT_OK_AND_ASSIGN(const Channel c,
                       BuildDiscretizedLaplacian(Share(std::move(grid)), spec,
                                                 0.0));
  for (double p : c.matrix()) EXPECT_NEAR(p, 1.0 / 20, 1e-15);
}

TEST(LaplacianTest, OneSampleIsGeometric) {
  const GridSpec spec = Grid(5, 6);
  ASSERT_OK_AND_ASSIGN(MetricSpace grid, BuildGrid(spec));
  const auto space = Share(std::move(grid));
  LaplacianOptions options;
  options.samples_per_axis = 1;
  ASSERT_OK_AND_ASSIGN(const Channel lap,
                       BuildDiscretizedLaplacian(space, spec, 0.004, options));
  ASSERT_OK_AND_ASSIGN(const Channel geo, BuildGeometric(space, 0.004));
  EXPECT_THAT(V(lap.matrix()), Pointwise(DoubleNear(1e-14), V(geo.matrix())));
}

// Brute-force midpoint rule: every sub-sample of every cell, no offset table.
std::vector<double> TruncatedOracle(const GridSpec& spec, double eps, int s) {
  const size_t n = spec.size();
  std::vector<double> m(n * n, 0.0);
  for (PointId x = 0; x < n; ++x) {
    const PlanarPoint cx = CellCenter(spec, x);
    double total = 0.0;
    for (PointId y = 0; y < n; ++y) {
      const PlanarPoint cy = CellCenter(spec, y);
      double acc = 0.0;
      for (int i = 0; i < s; ++i) {
        for (int j = 0; j < s; ++j) {
          const double px = cy.x_m + spec.cell_width_m() * ((i + 0.5) / s - 0.5);
          const double py =
              cy.y_m + spec.cell_height_m() * ((j + 0.5) / s - 0.5);
          acc += std::exp(-eps * std::hypot(px - cx.x_m, py - cx.y_m));
        }
      }
      m[x * n + y] = acc;
      total += acc;
    }
    for (PointId y = 0; y < n; ++y) m[x * n + y] /= total;
  }
  return m;
}

TEST(LaplacianTest, TruncatedMatchesBruteForceIntegral) {
  const GridSpec spec = Grid(4, 3);
  ASSERT_OK_AND_ASSIGN(MetricSpace grid, BuildGrid(spec));
  LaplacianOptions options;
  options.samples_per_axis = 4;
  ASSERT_OK_AND_ASSIGN(const Channel c,
                       BuildDiscretizedLaplacian(Share(std::move(grid)), spec,
                                                 0.01, options));
  EXPECT_THAT(V(c.matrix()),
              Pointwise(DoubleNear(1e-13), TruncatedOracle(spec, 0.01, 4)));
}

// Density over a wide window; samples outside the grid go to the nearest
// cell by clamping row and column.
std::vector<double> PlaneOracle(const GridSpec& spec, double eps, int s,
                                int pad) {
  const size_t n = spec.size();
  const double cw = spec.cell_width_m(), ch = spec.cell_height_m();
  std::vector<double> m(n * n, 0.0);
  for (PointId x = 0; x < n; ++x) {
    const PlanarPoint cx = CellCenter(spec, x);
    double total = 0.0;
    const int rows = static_cast<int>(spec.rows), cols = static_cast<int>(spec.cols);
    for (int r = -pad; r < rows + pad; ++r) {
      for (int c = -pad; c < cols + pad; ++c) {
        const double x0 = -spec.width_m / 2 + c * cw;
        const double y0 = spec.height_m / 2 - r * ch;
        double acc = 0.0;
        for (int i = 0; i < s; ++i) {
          for (int j = 0; j < s; ++j) {
            const double px = x0 + cw * (i + 0.5) / s;
            const double py = y0 - ch * (j + 0.5) / s;
            acc += std::exp(-eps * std::hypot(px - cx.x_m, py - cx.y_m));
          }
        }
        const int rr = std::clamp(r, 0, rows - 1);
        const int cc = std::clamp(c, 0, cols - 1);
        m[x * n + rr * spec.cols + cc] += acc;
        total += acc;
      }
    }
    for (PointId y = 0; y < n; ++y) m[x * n + y] /= total;
  }
  return m;
}

TEST(LaplacianTest, PlaneClampedMatchesBruteForceIntegral) {
  const GridSpec spec = Grid(3, 4);
  ASSERT_OK_AND_ASSIGN(MetricSpace grid, BuildGrid(spec));
  LaplacianOptions options;
  options.samples_per_axis = 3;
  options.normalization = LaplacianNormalization::kPlaneClamped;
  // Density at 60 cells is exp(-0.02 * 9000), far below rounding.
  ASSERT_OK_AND_ASSIGN(const Channel c,
                       BuildDiscretizedLaplacian(Share(std::move(grid)), spec,
                                                 0.02, options));
  ExpectRowStochastic(c);
  EXPECT_THAT(V(c.matrix()),
              Pointwise(DoubleNear(1e-12), PlaneOracle(spec, 0.02, 3, 60)));
}

TEST(LaplacianTest, PlaneClampedPutsMoreMassOnTheBorder) {
  const GridSpec spec = Grid(5, 5);
  ASSERT_OK_AND_ASSIGN(MetricSpace grid, BuildGrid(spec));
  const auto space = Share(std::move(grid));
  LaplacianOptions plane;
  plane.normalization = LaplacianNormalization::kPlaneClamped;
  ASSERT_OK_AND_ASSIGN(const Channel truncated,
                       BuildDiscretizedLaplacian(space, spec, 0.005));
  ASSERT_OK_AND_ASSIGN(const Channel clamped,
                       BuildDiscretizedLaplacian(space, spec, 0.005, plane));
  // Corner to corner.
  EXPECT_GT(clamped(0, 24), truncated(0, 24));
  // The center cell only receives mass from inside the grid.
  EXPECT_LT(clamped(0, 12), truncated(0, 12));
}

TEST(LaplacianTest, PlaneClampedNeedsPositiveEpsilon) {
  const GridSpec spec = Grid(2, 2);
  ASSERT_OK_AND_ASSIGN(MetricSpace grid, BuildGrid(spec));
  LaplacianOptions plane;
  plane.normalization = LaplacianNormalization::kPlaneClamped;
  EXPECT_THAT(
      BuildDiscretizedLaplacian(Share(std::move(grid)), spec, 0.0, plane),
      StatusIs(absl::StatusCode::kInvalidArgument));
}

TEST(LaplacianTest, RejectsForeignSpace) {
  EXPECT_THAT(BuildDiscretizedLaplacian(Line(4), Grid(2, 2), 0.01),
              StatusIs(absl::StatusCode::kInvalidArgument));
  ASSERT_OK_AND_ASSIGN(MetricSpace grid, BuildGrid(Grid(2, 2)));
  LaplacianOptions bad;
  bad.samples_per_axis = 0;
  EXPECT_THAT(BuildDiscretizedLaplacian(Share(std::move(grid)), Grid(2, 2),
                                        0.01, bad),
              StatusIs(absl::StatusCode::kInvalidArgument));
}

TEST(LaplacianTest, CloseToGeometricAtPaperScale) {
  const GridSpec spec = GridSpec{};
  ASSERT_OK_AND_ASSIGN(MetricSpace grid, BuildGrid(spec));
  const auto space = Share(std::move(grid));
  ASSERT_OK_AND_ASSIGN(const Channel lap,
                       BuildDiscretizedLaplacian(space, spec, 0.004));
  ASSERT_OK_AND_ASSIGN(const Channel geo, BuildGeometric(space, 0.004));
  ExpectRowStochastic(lap);
  double worst = 0.0;
  for (PointId x = 0; x < lap.size(); ++x) {
    double tv = 0.0;
    for (PointId y = 0; y < lap.size(); ++y) tv += std::abs(lap(x, y) - geo(x, y));
    worst = std::max(worst, tv / 2);
  }
  EXPECT_LT(worst, 0.05);
  EXPECT_GT(worst, 0.0);
}

TEST(ChannelTest, FromMatrixValidatesRows) {
  EXPECT_OK(Channel::FromMatrix(Line(2), {0.5, 0.5, 0.1, 0.9}));
  EXPECT_THAT(Channel::FromMatrix(Line(2), {0.5, 0.6, 0.1, 0.9}),
              StatusIs(absl::StatusCode::kInvalidArgument));
  EXPECT_THAT(Channel::FromMatrix(Line(2), {1.5, -0.5, 0.1, 0.9}),
              StatusIs(absl::StatusCode::kInvalidArgument));
  EXPECT_THAT(Channel::FromMatrix(Line(2), {1.0, 0.0, 1.0}),
              StatusIs(absl::StatusCode::kInvalidArgument));
}

TEST(ChannelTest, IdentityHasUnitDiagonal) {
  const Channel c = Channel::Identity(Line(3));
  EXPECT_THAT(V(c.row(1)), ElementsAre(0.0, 1.0, 0.0));
}

TEST(MechanismNameTest, RoundTrips) {
  for (Mechanism m : {Mechanism::kFlat, Mechanism::kGeometric,
                      Mechanism::kDiscretizedLaplacian, Mechanism::kCustom}) {
    ASSERT_OK_AND_ASSIGN(const Mechanism parsed,
                         ParseMechanism(MechanismName(m)));
    EXPECT_EQ(parsed, m);
  }
  EXPECT_THAT(ParseMechanism("gaussian"),
              StatusIs(absl::StatusCode::kInvalidArgument));
}

TEST(SampleTest, FrequenciesMatchRow) {
  ASSERT_OK_AND_ASSIGN(const Channel c, BuildGeometric(Line(5), 0.7));
  Rng rng(2024);
  constexpr int kDraws = 200000;
  std::vector<int> counts(5, 0);
  for (int i = 0; i < kDraws; ++i) {
    ASSERT_OK_AND_ASSIGN(const PointId y, Sample(c, 1, rng));
    ++counts[y];
  }
  for (PointId y = 0; y < 5; ++y) {
    const double p = c(1, y);
    const double sigma = std::sqrt(kDraws * p * (1 - p));
    EXPECT_NEAR(counts[y], kDraws * p, 5 * sigma) << "y=" << y;
  }
}

TEST(SampleTest, NeverReportsZeroProbabilityOutputs) {
  ASSERT_OK_AND_ASSIGN(const Channel c,
                       Channel::FromMatrix(Line(4), {0, 0.5, 0, 0.5,  //
                                                     0, 0, 1, 0,      //
                                                     1, 0, 0, 0,      //
                                                     0, 0, 0, 1}));
  Rng rng(1);
  const ChannelSampler sampler(c);
  for (int i = 0; i < 10000; ++i) {
    const PointId y = sampler.Sample(0, rng);
    EXPECT_TRUE(y == 1 || y == 3);
  }
}

TEST(SampleTest, OutOfRangeTrueValue) {
  const Channel c = Channel::Identity(Line(3));
  Rng rng(1);
  EXPECT_THAT(Sample(c, 3, rng), StatusIs(absl::StatusCode::kOutOfRange));
}

TEST(SampleTest, SamplerMatchesLinearScan) {
  ASSERT_OK_AND_ASSIGN(MetricSpace grid, BuildGrid(Grid(8, 8)));
  const auto space = Share(std::move(grid));
  ASSERT_OK_AND_ASSIGN(const Channel flat, BuildFlat(space, 2.0));
  ASSERT_OK_AND_ASSIGN(const Channel geo, BuildGeometric(space, 0.003));
  for (const Channel* c : {&flat, &geo}) {
    const ChannelSampler sampler(*c);
    Rng a(77), b(77);
    for (int i = 0; i < 20000; ++i) {
      const PointId x = i % c->size();
      ASSERT_OK_AND_ASSIGN(const PointId expected, Sample(*c, x, a));
      EXPECT_EQ(sampler.Sample(x, b), expected);
    }
  }
}

TEST(SampleTest, SanitizeAllIsDeterministicAndOrderPreserving) {
  ASSERT_OK_AND_ASSIGN(const Channel c, BuildFlat(Line(6), 1.0));
  const ChannelSampler sampler(c);
  const std::vector<PointId> records = {0, 5, 2, 2, 3};
  Rng a(9), b(9);
  const std::vector<PointId> first = sampler.SanitizeAll(records, a);
  EXPECT_EQ(first, sampler.SanitizeAll(records, b));
  ASSERT_EQ(first.size(), records.size());
  Rng c2(9);
  for (size_t i = 0; i < records.size(); ++i) {
    EXPECT_EQ(first[i], sampler.Sample(records[i], c2));
  }
}

// Independent triple loop over (x, x', y).
double ViolationOracle(const Channel& c, double eps, const MetricSpace& d) {
  double worst = 0.0;
  for (PointId x = 0; x < c.size(); ++x) {
    for (PointId x2 = 0; x2 < c.size(); ++x2) {
      for (PointId y = 0; y < c.size(); ++y) {
        const double p = c(x, y), q = c(x2, y);
        if (p == 0.0 && q == 0.0) continue;
        if (q == 0.0) return std::numeric_limits<double>::infinity();
        if (p == 0.0) continue;
        worst = std::max(worst, std::log(p / q) - eps * d.distance(x, x2));
      }
    }
  }
  return worst;
}

std::shared_ptr<const MetricSpace> RandomPoints(size_t n, Rng& rng) {
  std::vector<PlanarPoint> points;
  for (size_t i = 0; i < n; ++i) {
    points.push_back({rng.UniformDouble() * 1000, rng.UniformDouble() * 1000});
  }
  return Share(*MetricSpace::FromPoints(points));
}

TEST(DxPrivacyTest, MatchesTripleLoopOracle) {
  Rng rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    const auto space = RandomPoints(2 + rng.UniformIndex(30), rng);
    const double eps = 0.001 + rng.UniformDouble() * 0.02;
    ASSERT_OK_AND_ASSIGN(const Channel c, BuildGeometric(space, eps));
    for (double check : {0.5 * eps, eps, 2 * eps}) {
      EXPECT_NEAR(DxPrivacyViolation(c, check),
                  ViolationOracle(c, check, *space), 1e-12);
    }
  }
}

// Row normalizers differ on a bounded line. With eps = ln 2 the rows are
// (4/7, 2/7, 1/7), (1/4, 1/2, 1/4), (1/7, 2/7, 4/7), and the worst ratio is
// (4/7) / (1/4) = 2 * 8/7 between neighbours.
TEST(DxPrivacyTest, NormalizedGeometricOnALineExceedsEpsilon) {
  ASSERT_OK_AND_ASSIGN(const Channel c, BuildGeometric(Line(3), std::log(2.0)));
  EXPECT_NEAR(DxPrivacyViolation(c, std::log(2.0)), std::log(8.0 / 7.0),
              1e-14);
}

// ln(Z_x' / Z_x) <= eps * d(x, x'), so the normalized channel always meets
// twice its parameter.
TEST(DxPrivacyTest, GeometricSatisfiesTwiceEpsilon) {
  Rng rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const auto space = RandomPoints(2 + rng.UniformIndex(49), rng);
    const double eps = 0.001 + rng.UniformDouble() * 0.02;
    ASSERT_OK_AND_ASSIGN(const Channel c, BuildGeometric(space, eps));
    EXPECT_LE(DxPrivacyViolation(c, 2 * eps), 1e-9);
  }
}

// When every row has the same normalizer the triangle inequality alone
// gives the eps bound.
TEST(DxPrivacyTest, GeometricWithEqualNormalizersSatisfiesEpsilon) {
  for (size_t n : {3, 8, 25, 50}) {
    std::vector<PlanarPoint> polygon;
    for (size_t i = 0; i < n; ++i) {
      const double a = 2 * std::numbers::pi * i / n;
      polygon.push_back({500 * std::cos(a), 500 * std::sin(a)});
    }
    const auto space = Share(*MetricSpace::FromPoints(polygon));
    ASSERT_OK_AND_ASSIGN(const Channel c, BuildGeometric(space, 0.004));
    EXPECT_LE(DxPrivacyViolation(c, 0.004), 1e-9) << n;
    EXPECT_GT(DxPrivacyViolation(c, 0.002), 0.0) << n;
  }
}

TEST(DxPrivacyTest, FlatIsEpsilonLdp) {
  const auto space = Line(7);
  ASSERT_OK_AND_ASSIGN(const MetricSpace discrete, MetricSpace::Discrete(7));
  ASSERT_OK_AND_ASSIGN(const Channel c, BuildFlat(space, 1.5));
  ASSERT_OK_AND_ASSIGN(const double ok, DxPrivacyViolation(c, 1.5, discrete));
  EXPECT_LE(ok, 1e-9);
  ASSERT_OK_AND_ASSIGN(const double bad, DxPrivacyViolation(c, 1.0, discrete));
  EXPECT_NEAR(bad, 0.5, 1e-12);
}

TEST(DxPrivacyTest, OneSidedZeroIsInfinite) {
  ASSERT_OK_AND_ASSIGN(const Channel c,
                       Channel::FromMatrix(Line(2), {1.0, 0.0, 0.5, 0.5}));
  EXPECT_EQ(DxPrivacyViolation(c, 10.0),
            std::numeric_limits<double>::infinity());
  EXPECT_EQ(DxPrivacyViolation(Channel::Identity(Line(2)), 1.0),
            std::numeric_limits<double>::infinity());
}

TEST(DxPrivacyTest, MetricSizeMismatch) {
  ASSERT_OK_AND_ASSIGN(const MetricSpace discrete, MetricSpace::Discrete(3));
  EXPECT_THAT(DxPrivacyViolation(Channel::Identity(Line(2)), 1.0, discrete),
              StatusIs(absl::StatusCode::kInvalidArgument));
}

}  // namespace
}  // namespace mldp
