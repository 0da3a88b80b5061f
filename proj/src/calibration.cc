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

#include "mldp/calibration.h"

#include <cmath>
#include <utility>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "mldp/simd/kernels.h"
#include "mldp/status_macros.h"

namespace mldp {

absl::StatusOr<double> ExpectedDistance(const Channel& channel,
                                        const Distribution& prior) {
  const MetricSpace& space = channel.space();
  if (prior.size() != space.size()) {
    return absl::InvalidArgumentError(
        absl::StrCat("prior has ", prior.size(), " entries, channel has ",
                     space.size()));
  }
  double total = 0.0;
  for (PointId x = 0; x < space.size(); ++x) {
    if (prior[x] == 0.0) continue;
    total += prior[x] * simd::Dot(channel.row(x), space.row(x));
  }
  return total;
}

absl::StatusOr<double> UniformExpectedDistance(const MetricSpace& space,
                                               const Distribution& prior) {
  if (prior.size() != space.size()) {
    return absl::InvalidArgumentError(
        absl::StrCat("prior has ", prior.size(), " entries, space has ",
                     space.size()));
  }
  double total = 0.0;
  for (PointId x = 0; x < space.size(); ++x) {
    total += prior[x] * simd::Sum(space.row(x));
  }
  return total / static_cast<double>(space.size());
}

absl::StatusOr<Channel> BuildMechanism(
    Mechanism family, std::shared_ptr<const MetricSpace> space, double epsilon,
    const LaplacianOptions& laplacian) {
  switch (family) {
    case Mechanism::kFlat:
      return BuildFlat(std::move(space), epsilon);
    case Mechanism::kGeometric:
      return BuildGeometric(std::move(space), epsilon);
    case Mechanism::kDiscretizedLaplacian: {
      if (!space->grid().has_value()) {
        return absl::InvalidArgumentError(
            "discretized Laplacian needs a grid metric space");
      }
      const GridSpec spec = *space->grid();
      return BuildDiscretizedLaplacian(std::move(space), spec, epsilon,
                                       laplacian);
    }
    case Mechanism::kCustom:
      break;
  }
  return absl::InvalidArgumentError("custom channels have no epsilon family");
}

std::string CalibrationResult::CsvHeader() {
  return "family,epsilon,achieved_ed,target_ed,iterations";
}

std::string CalibrationResult::ToCsvRow() const {
  return absl::StrFormat("%s,%.17g,%.17g,%.17g,%d", MechanismName(family),
                         epsilon, achieved_ed, target_ed, iterations);
}

absl::StatusOr<CalibrationResult> Calibrate(
    Mechanism family, std::shared_ptr<const MetricSpace> space,
    const Distribution& prior, double target_ed,
    const CalibrationOptions& options) {
  MLDP_ASSIGN_OR_RETURN(const double uniform_ed,
                        UniformExpectedDistance(*space, prior));
  if (!(target_ed > 0.0) || !std::isfinite(target_ed)) {
    return absl::OutOfRangeError(absl::StrCat(
        "TargetUnreachable: target expected distance must be positive, got ",
        target_ed));
  }

  CalibrationResult result;
  result.family = family;
  result.target_ed = target_ed;
  auto within_tolerance = [&](double ed) {
    return std::abs(ed - target_ed) <= options.rel_tol * target_ed;
  };

  if (within_tolerance(uniform_ed)) {
    result.achieved_ed = uniform_ed;
    result.at_boundary = true;
    return result;
  }
  if (target_ed > uniform_ed) {
    return absl::OutOfRangeError(absl::StrFormat(
        "TargetUnreachable: target %.6g m is not below the epsilon=0 expected "
        "distance %.6g m",
        target_ed, uniform_ed));
  }

  auto evaluate = [&](double epsilon) -> absl::StatusOr<double> {
    ++result.iterations;
    MLDP_ASSIGN_OR_RETURN(
        const Channel channel,
        BuildMechanism(family, space, epsilon, options.laplacian));
    return ExpectedDistance(channel, prior);
  };
  auto done = [&](double epsilon, double ed) {
    result.epsilon = epsilon;
    result.achieved_ed = ed;
    return result;
  };

  double low = 0.0;
  double high = 1.0;
  while (true) {
    if (result.iterations >= options.max_iter) {
      return absl::ResourceExhaustedError(absl::StrCat(
          "NoConvergence: no bracket found after ", result.iterations,
          " evaluations"));
    }
    MLDP_ASSIGN_OR_RETURN(const double ed, evaluate(high));
    result.bracket_low = low;
    result.bracket_high = high;
    if (within_tolerance(ed)) return done(high, ed);
    if (ed < target_ed) break;
    low = high;
    high *= 2.0;
  }
  while (result.iterations < options.max_iter) {
    const double mid = 0.5 * (low + high);
    MLDP_ASSIGN_OR_RETURN(const double ed, evaluate(mid));
    if (within_tolerance(ed)) return done(mid, ed);
    if (ed > target_ed) {
      low = mid;
    } else {
      high = mid;
    }
    result.bracket_low = low;
    result.bracket_high = high;
  }
  return absl::ResourceExhaustedError(absl::StrFormat(
      "NoConvergence: bracket [%.17g, %.17g] after %d evaluations", low, high,
      result.iterations));
}

}  // namespace mldp
