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

#ifndef MLDP_CALIBRATION_H_
#define MLDP_CALIBRATION_H_

#include <memory>
#include <string>

#include "absl/status/statusor.h"
#include "mldp/channel.h"
#include "mldp/distribution.h"
#include "mldp/metric_space.h"

namespace mldp {

// Sum over x, y of prior(x) * P[M(x) = y] * d(x, y), evaluated exactly.
absl::StatusOr<double> ExpectedDistance(const Channel& channel,
                                        const Distribution& prior);

// Expected distance of the uniform channel (every mechanism at epsilon 0),
// i.e. the prior-weighted mean distance to a uniformly random point.
absl::StatusOr<double> UniformExpectedDistance(const MetricSpace& space,
                                               const Distribution& prior);

// Builds a mechanism of `family` at `epsilon`. The discretized Laplacian
// requires a grid-built space.
absl::StatusOr<Channel> BuildMechanism(
    Mechanism family, std::shared_ptr<const MetricSpace> space, double epsilon,
    const LaplacianOptions& laplacian = {});

struct CalibrationOptions {
  // Relative tolerance on the achieved expected distance.
  double rel_tol = 1e-6;
  // Cap on expected-distance evaluations (bracketing plus bisection).
  int max_iter = 200;
  LaplacianOptions laplacian;
};

struct CalibrationResult {
  Mechanism family = Mechanism::kFlat;
  double epsilon = 0.0;
  double achieved_ed = 0.0;
  double target_ed = 0.0;
  int iterations = 0;
  double bracket_low = 0.0;
  double bracket_high = 0.0;
  // The target equals the epsilon = 0 value; no search was run.
  bool at_boundary = false;

  static std::string CsvHeader();
  // family,epsilon,achieved_ed,target_ed,iterations
  std::string ToCsvRow() const;
};

// Finds epsilon with ExpectedDistance(build(epsilon), prior) == target_ed
// within options.rel_tol: the upper end of the bracket doubles from 1 until
// the expected distance drops below the target, then bisection.
//
// Errors: OutOfRange ("TargetUnreachable") when target_ed <= 0 or exceeds
// the epsilon = 0 value; ResourceExhausted ("NoConvergence") after
// options.max_iter evaluations.
absl::StatusOr<CalibrationResult> Calibrate(
    Mechanism family, std::shared_ptr<const MetricSpace> space,
    const Distribution& prior, double target_ed,
    const CalibrationOptions& options = {});

}  // namespace mldp

#endif  // MLDP_CALIBRATION_H_
