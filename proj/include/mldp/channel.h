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

#ifndef MLDP_CHANNEL_H_
#define MLDP_CHANNEL_H_

#include <memory>
#include <span>
#include "absl/strings/string_view.h"
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "mldp/metric_space.h"
#include "mldp/random.h"

namespace mldp {

enum class Mechanism { kFlat, kGeometric, kDiscretizedLaplacian, kCustom };

absl::string_view MechanismName(Mechanism mechanism);
absl::StatusOr<Mechanism> ParseMechanism(absl::string_view name);

// Row-stochastic matrix P[M(x) = y]: row = true value, column = report.
// Epsilon is per meter for the geometric and Laplacian mechanisms and
// unitless for the flat one.
class ChannelBuilder;

class Channel {
 public:
  // Rows must be nonnegative and sum to 1 within 1e-9.
  static absl::StatusOr<Channel> FromMatrix(
      std::shared_ptr<const MetricSpace> space, std::vector<double> matrix,
      Mechanism mechanism = Mechanism::kCustom, double epsilon = 0.0);

  // P[M(x) = x] = 1.
  static Channel Identity(std::shared_ptr<const MetricSpace> space);

  size_t size() const { return space_->size(); }
  const MetricSpace& space() const { return *space_; }
  const std::shared_ptr<const MetricSpace>& shared_space() const {
    return space_;
  }
  Mechanism mechanism() const { return mechanism_; }
  double epsilon() const { return epsilon_; }

  double operator()(PointId x, PointId y) const {
    return matrix_[x * size() + y];
  }
  std::span<const double> row(PointId x) const {
    return {matrix_.data() + x * size(), size()};
  }
  std::span<const double> matrix() const { return matrix_; }

 private:
  friend class ChannelBuilder;

  Channel(std::shared_ptr<const MetricSpace> space, std::vector<double> matrix,
          Mechanism mechanism, double epsilon)
      : space_(std::move(space)),
        matrix_(std::move(matrix)),
        mechanism_(mechanism),
        epsilon_(epsilon) {}

  std::shared_ptr<const MetricSpace> space_;
  std::vector<double> matrix_;
  Mechanism mechanism_;
  double epsilon_;
};

// K-ary randomized response: e^eps / (|X| - 1 + e^eps) on the diagonal and
// 1 / (|X| - 1 + e^eps) elsewhere. Requires |X| >= 2.
absl::StatusOr<Channel> BuildFlat(std::shared_ptr<const MetricSpace> space,
                                  double epsilon);

// Row x proportional to exp(-epsilon * d(x, y)), normalized over the space.
absl::StatusOr<Channel> BuildGeometric(
    std::shared_ptr<const MetricSpace> space, double epsilon);

enum class LaplacianNormalization {
  // The density is restricted to the grid rectangle and each row is
  // normalized over it.
  kTruncated,
  // The density is integrated over the whole plane; mass landing outside the
  // rectangle is reported at the nearest boundary cell. Needs epsilon > 0.
  kPlaneClamped,
};

struct LaplacianOptions {
  // Midpoint-rule subdivisions per cell axis.
  int samples_per_axis = 5;
  LaplacianNormalization normalization = LaplacianNormalization::kTruncated;
};

// Planar Laplacian density exp(-epsilon * |p - center(x)|) integrated over
// each grid cell. `space` must have been produced by BuildGrid(spec).
absl::StatusOr<Channel> BuildDiscretizedLaplacian(
    std::shared_ptr<const MetricSpace> space, const GridSpec& spec,
    double epsilon, const LaplacianOptions& options = {});

// Draws a report for true value x by inverting the row CDF with one uniform
// draw from `rng`.
absl::StatusOr<PointId> Sample(const Channel& channel, PointId x, Rng& rng);

// Precomputed row CDFs for repeated sampling. Produces exactly the same
// report as Sample() for the same random stream.
class ChannelSampler {
 public:
  explicit ChannelSampler(const Channel& channel);

  PointId Sample(PointId x, Rng& rng) const;

  // Sanitizes each record independently, preserving order.
  std::vector<PointId> SanitizeAll(std::span<const PointId> records,
                                   Rng& rng) const;

 private:
  size_t size_;
  std::vector<double> cumulative_;
  std::vector<PointId> last_positive_;
};

// Largest value of ln(P[x][y] / P[x'][y]) - epsilon * d(x, x') over all
// (x, x', y), with d taken from `metric`. Pairs where both entries are zero
// contribute 0, a zero only in the denominator contributes +infinity. The
// channel satisfies epsilon * d-privacy iff the result is <= 0 (up to
// rounding).
absl::StatusOr<double> DxPrivacyViolation(const Channel& channel,
                                          double epsilon,
                                          const MetricSpace& metric);
double DxPrivacyViolation(const Channel& channel, double epsilon);

}  // namespace mldp

#endif  // MLDP_CHANNEL_H_
