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

#ifndef MLDP_EXPERIMENT_H_
#define MLDP_EXPERIMENT_H_

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include "absl/strings/string_view.h"
#include <vector>

#include "absl/status/statusor.h"
#include "mldp/calibration.h"
#include "mldp/channel.h"
#include "mldp/ingestion.h"
#include "mldp/metric_space.h"
#include "mldp/reconstruction.h"

namespace mldp {

enum class CalibrationPrior { kUniform, kEmpirical };

absl::string_view PriorName(CalibrationPrior prior);

// Defaults reproduce the Paris check-in experiment: 30 x 30 cells of 150 m,
// 450 m expected distance, 750 records added 10 at a time.
struct ExperimentConfig {
  GridSpec grid;
  double target_ed_m = 450.0;
  std::vector<Mechanism> mechanisms = {Mechanism::kFlat, Mechanism::kGeometric,
                                       Mechanism::kDiscretizedLaplacian};
  size_t sample_size = 750;
  size_t step = 10;
  int trials = 1;
  uint64_t seed = 1;
  CalibrationPrior calibration_prior = CalibrationPrior::kUniform;
  double calibration_rel_tol = 1e-6;
  int calibration_max_iter = 200;
  double em_l1_tol = 1e-9;
  int em_max_iter = 10000;
  int laplacian_samples_per_axis = 5;
  LaplacianNormalization laplacian_normalization =
      LaplacianNormalization::kTruncated;
  // Debug: use these epsilons instead of calibrating.
  std::map<Mechanism, double> fixed_epsilon;

  absl::Status Validate() const;

  // "key = value" lines in a fixed order; Parse(Serialize()) == *this.
  std::string Serialize() const;
  static absl::StatusOr<ExperimentConfig> Parse(absl::string_view text);

  // FNV-1a of Serialize().
  uint64_t Hash() const;

  friend bool operator==(const ExperimentConfig&,
                         const ExperimentConfig&) = default;
};

struct CalibrationRow {
  CalibrationPrior prior = CalibrationPrior::kUniform;
  CalibrationResult result;
  // This calibration configured the channels of the run.
  bool used = false;
};

struct CurvePoint {
  size_t n = 0;
  // Indexed like ExperimentConfig::mechanisms.
  std::vector<double> mean;
  std::vector<double> stddev;
};

struct ExperimentReport {
  std::vector<CalibrationRow> calibrations;
  // Calibrations under the other prior that could not be computed.
  std::vector<std::string> calibration_notes;
  std::vector<CurvePoint> curve;
  size_t parsed_records = 0;
  size_t out_of_bounds = 0;
};

struct RunOptions {
  // Worker threads for the prefix x mechanism evaluations; 0 picks the
  // hardware concurrency. Output does not depend on this.
  int threads = 1;
  // Called once per curve point, in order of increasing n, as soon as the
  // point and all earlier ones are complete.
  std::function<void(const CurvePoint&)> on_point;
  // Called once all calibrations are done, before any curve point.
  std::function<void(const ExperimentReport&)> on_calibrated;
};

// Full pipeline: grid assignment, prefix sampling, calibration of every
// configured mechanism to config.target_ed_m, then the utility loss of each
// prefix under each mechanism. Deterministic given config.seed.
absl::StatusOr<ExperimentReport> RunExperiment(
    const ExperimentConfig& config, std::span<const CheckIn> checkins,
    const RunOptions& options = {});

// Calibrates `family` on `space` as configured, honoring fixed_epsilon and
// the single-point space (where every mechanism is the identity).
absl::StatusOr<CalibrationResult> CalibrateForExperiment(
    const ExperimentConfig& config, Mechanism family,
    const std::shared_ptr<const MetricSpace>& space, const Distribution& prior);

// Channel for a calibrated mechanism.
absl::StatusOr<Channel> ChannelForExperiment(
    const ExperimentConfig& config, Mechanism family,
    const std::shared_ptr<const MetricSpace>& space, double epsilon);

// "# config_hash=<hex> seed=<seed>"
std::string ProvenanceComment(const ExperimentConfig& config);

std::string FormatCalibrationCsv(const ExperimentConfig& config,
                                 const ExperimentReport& report);
std::string CurveCsvHeader(const ExperimentConfig& config);
std::string FormatCurveRow(const ExperimentConfig& config,
                           const CurvePoint& point);
// Whitespace-separated blocks, one per mechanism, separated by two blank
// lines (gnuplot "index" blocks).
std::string FormatCurveDat(const ExperimentConfig& config,
                           std::span<const CurvePoint> curve);

}  // namespace mldp

#endif  // MLDP_EXPERIMENT_H_
