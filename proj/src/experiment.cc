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

#include "mldp/experiment.h"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <condition_variable>
#include <mutex>
#include <thread>
#include <utility>

#include "absl/strings/ascii.h"
#include "absl/strings/match.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "absl/strings/str_join.h"
#include "absl/strings/str_split.h"
#include "mldp/random.h"
#include "mldp/status_macros.h"
#include "mldp/utility_loss.h"

namespace mldp {

namespace {

constexpr absl::string_view kFixedEpsilonPrefix = "fixed_epsilon.";

template <typename T>
absl::Status ParseValue(absl::string_view key, absl::string_view text, T& out) {
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, out);
  if (text.empty() || ec != std::errc() || ptr != end) {
    return absl::InvalidArgumentError(
        absl::StrCat("config key '", key, "': cannot parse '", text, "'"));
  }
  return absl::OkStatus();
}

absl::string_view NormalizationName(LaplacianNormalization n) {
  return n == LaplacianNormalization::kTruncated ? "truncated" : "plane";
}

}  // namespace

absl::string_view PriorName(CalibrationPrior prior) {
  return prior == CalibrationPrior::kUniform ? "uniform" : "empirical";
}

absl::Status ExperimentConfig::Validate() const {
  MLDP_RETURN_IF_ERROR(grid.Validate());
  if (!(target_ed_m > 0.0)) {
    return absl::InvalidArgumentError("target_ed_m must be positive");
  }
  if (mechanisms.empty()) {
    return absl::InvalidArgumentError("at least one mechanism is required");
  }
  for (Mechanism m : mechanisms) {
    if (m == Mechanism::kCustom) {
      return absl::InvalidArgumentError("custom is not an experiment mechanism");
    }
    if (std::count(mechanisms.begin(), mechanisms.end(), m) > 1) {
      return absl::InvalidArgumentError(
          absl::StrCat("mechanism listed twice: ", MechanismName(m)));
    }
  }
  if (step < 1 || sample_size < step) {
    return absl::InvalidArgumentError("need sample_size >= step >= 1");
  }
  if (trials < 1) return absl::InvalidArgumentError("trials must be >= 1");
  if (!(em_l1_tol > 0.0) || em_max_iter < 1) {
    return absl::InvalidArgumentError("invalid EM settings");
  }
  if (!(calibration_rel_tol > 0.0) || calibration_max_iter < 1) {
    return absl::InvalidArgumentError("invalid calibration settings");
  }
  if (laplacian_samples_per_axis < 1) {
    return absl::InvalidArgumentError(
        "laplacian_samples_per_axis must be positive");
  }
  for (const auto& [m, eps] : fixed_epsilon) {
    if (!(eps >= 0.0)) {
      return absl::InvalidArgumentError("fixed epsilon must be nonnegative");
    }
  }
  return absl::OkStatus();
}

std::string ExperimentConfig::Serialize() const {
  std::vector<absl::string_view> names;
  for (Mechanism m : mechanisms) names.push_back(MechanismName(m));
  std::string out;
  absl::StrAppendFormat(&out, "center_lat = %.17g\n", grid.center_lat);
  absl::StrAppendFormat(&out, "center_lon = %.17g\n", grid.center_lon);
  absl::StrAppendFormat(&out, "width_m = %.17g\n", grid.width_m);
  absl::StrAppendFormat(&out, "height_m = %.17g\n", grid.height_m);
  absl::StrAppendFormat(&out, "rows = %d\n", grid.rows);
  absl::StrAppendFormat(&out, "cols = %d\n", grid.cols);
  absl::StrAppendFormat(&out, "target_ed_m = %.17g\n", target_ed_m);
  absl::StrAppendFormat(&out, "mechanisms = %s\n", absl::StrJoin(names, ","));
  absl::StrAppendFormat(&out, "sample_size = %d\n", sample_size);
  absl::StrAppendFormat(&out, "step = %d\n", step);
  absl::StrAppendFormat(&out, "trials = %d\n", trials);
  absl::StrAppendFormat(&out, "seed = %d\n", seed);
  absl::StrAppendFormat(&out, "calibration_prior = %s\n",
                        PriorName(calibration_prior));
  absl::StrAppendFormat(&out, "calibration_rel_tol = %.17g\n",
                        calibration_rel_tol);
  absl::StrAppendFormat(&out, "calibration_max_iter = %d\n",
                        calibration_max_iter);
  absl::StrAppendFormat(&out, "em_l1_tol = %.17g\n", em_l1_tol);
  absl::StrAppendFormat(&out, "em_max_iter = %d\n", em_max_iter);
  absl::StrAppendFormat(&out, "laplacian_samples_per_axis = %d\n",
                        laplacian_samples_per_axis);
  absl::StrAppendFormat(&out, "laplacian_normalization = %s\n",
                        NormalizationName(laplacian_normalization));
  for (const auto& [m, eps] : fixed_epsilon) {
    absl::StrAppendFormat(&out, "%s%s = %.17g\n", kFixedEpsilonPrefix,
                          MechanismName(m), eps);
  }
  return out;
}

absl::StatusOr<ExperimentConfig> ExperimentConfig::Parse(
    absl::string_view text) {
  ExperimentConfig c;
  size_t line_number = 0;
  for (absl::string_view raw : absl::StrSplit(text, '\n')) {
    ++line_number;
    const absl::string_view line = absl::StripAsciiWhitespace(raw);
    if (line.empty() || line.front() == '#') continue;
    const size_t eq = line.find('=');
    if (eq == absl::string_view::npos) {
      return absl::InvalidArgumentError(
          absl::StrCat("config line ", line_number, ": expected key = value"));
    }
    absl::string_view key = absl::StripAsciiWhitespace(line.substr(0, eq));
    const absl::string_view value =
        absl::StripAsciiWhitespace(line.substr(eq + 1));

    if (key == "center_lat") {
      MLDP_RETURN_IF_ERROR(ParseValue(key, value, c.grid.center_lat));
    } else if (key == "center_lon") {
      MLDP_RETURN_IF_ERROR(ParseValue(key, value, c.grid.center_lon));
    } else if (key == "width_m") {
      MLDP_RETURN_IF_ERROR(ParseValue(key, value, c.grid.width_m));
    } else if (key == "height_m") {
      MLDP_RETURN_IF_ERROR(ParseValue(key, value, c.grid.height_m));
    } else if (key == "rows") {
      MLDP_RETURN_IF_ERROR(ParseValue(key, value, c.grid.rows));
    } else if (key == "cols") {
      MLDP_RETURN_IF_ERROR(ParseValue(key, value, c.grid.cols));
    } else if (key == "target_ed_m") {
      MLDP_RETURN_IF_ERROR(ParseValue(key, value, c.target_ed_m));
    } else if (key == "mechanisms") {
      c.mechanisms.clear();
      for (absl::string_view name :
           absl::StrSplit(value, ',', absl::SkipWhitespace())) {
        MLDP_ASSIGN_OR_RETURN(const Mechanism m,
                              ParseMechanism(absl::StripAsciiWhitespace(name)));
        c.mechanisms.push_back(m);
      }
    } else if (key == "sample_size") {
      MLDP_RETURN_IF_ERROR(ParseValue(key, value, c.sample_size));
    } else if (key == "step") {
      MLDP_RETURN_IF_ERROR(ParseValue(key, value, c.step));
    } else if (key == "trials") {
      MLDP_RETURN_IF_ERROR(ParseValue(key, value, c.trials));
    } else if (key == "seed") {
      MLDP_RETURN_IF_ERROR(ParseValue(key, value, c.seed));
    } else if (key == "calibration_prior") {
      if (value == "uniform") {
        c.calibration_prior = CalibrationPrior::kUniform;
      } else if (value == "empirical") {
        c.calibration_prior = CalibrationPrior::kEmpirical;
      } else {
        return absl::InvalidArgumentError(
            absl::StrCat("calibration_prior must be uniform or empirical, got '",
                         value, "'"));
      }
    } else if (key == "calibration_rel_tol") {
      MLDP_RETURN_IF_ERROR(ParseValue(key, value, c.calibration_rel_tol));
    } else if (key == "calibration_max_iter") {
      MLDP_RETURN_IF_ERROR(ParseValue(key, value, c.calibration_max_iter));
    } else if (key == "em_l1_tol") {
      MLDP_RETURN_IF_ERROR(ParseValue(key, value, c.em_l1_tol));
    } else if (key == "em_max_iter") {
      MLDP_RETURN_IF_ERROR(ParseValue(key, value, c.em_max_iter));
    } else if (key == "laplacian_samples_per_axis") {
      MLDP_RETURN_IF_ERROR(
          ParseValue(key, value, c.laplacian_samples_per_axis));
    } else if (key == "laplacian_normalization") {
      if (value == "truncated") {
        c.laplacian_normalization = LaplacianNormalization::kTruncated;
      } else if (value == "plane") {
        c.laplacian_normalization = LaplacianNormalization::kPlaneClamped;
      } else {
        return absl::InvalidArgumentError(absl::StrCat(
            "laplacian_normalization must be truncated or plane, got '", value,
            "'"));
      }
    } else if (absl::ConsumePrefix(&key, kFixedEpsilonPrefix)) {
      MLDP_ASSIGN_OR_RETURN(const Mechanism m, ParseMechanism(key));
      double eps = 0.0;
      MLDP_RETURN_IF_ERROR(ParseValue(key, value, eps));
      c.fixed_epsilon[m] = eps;
    } else {
      return absl::InvalidArgumentError(
          absl::StrCat("config line ", line_number, ": unknown key '", key,
                       "'"));
    }
  }
  return c;
}

uint64_t ExperimentConfig::Hash() const { return Fnv1a64(Serialize()); }

absl::StatusOr<CalibrationResult> CalibrateForExperiment(
    const ExperimentConfig& config, Mechanism family,
    const std::shared_ptr<const MetricSpace>& space, const Distribution& prior) {
  CalibrationResult result;
  result.family = family;
  result.target_ed = config.target_ed_m;
  if (space->size() == 1) {
    // Every mechanism on a single point reports the truth.
    result.at_boundary = true;
    return result;
  }
  if (const auto it = config.fixed_epsilon.find(family);
      it != config.fixed_epsilon.end()) {
    MLDP_ASSIGN_OR_RETURN(const Channel channel,
                          ChannelForExperiment(config, family, space, it->second));
    MLDP_ASSIGN_OR_RETURN(result.achieved_ed, ExpectedDistance(channel, prior));
    result.epsilon = it->second;
    return result;
  }
  CalibrationOptions options;
  options.rel_tol = config.calibration_rel_tol;
  options.max_iter = config.calibration_max_iter;
  options.laplacian = {config.laplacian_samples_per_axis,
                       config.laplacian_normalization};
  return Calibrate(family, space, prior, config.target_ed_m, options);
}

absl::StatusOr<Channel> ChannelForExperiment(
    const ExperimentConfig& config, Mechanism family,
    const std::shared_ptr<const MetricSpace>& space, double epsilon) {
  if (space->size() == 1) return Channel::Identity(space);
  return BuildMechanism(family, space, epsilon,
                        {config.laplacian_samples_per_axis,
                         config.laplacian_normalization});
}

namespace {

// Evaluates tasks [0, count) on `threads` workers and hands results to
// `emit` in index order as soon as a contiguous run is complete. Stops
// issuing work after the first failure; results completed before it are
// still emitted.
absl::Status RunOrdered(
    size_t count, int threads,
    const std::function<absl::StatusOr<double>(size_t)>& task,
    const std::function<void(size_t, double)>& emit) {
  if (threads <= 1) {
    for (size_t i = 0; i < count; ++i) {
      MLDP_ASSIGN_OR_RETURN(const double value, task(i));
      emit(i, value);
    }
    return absl::OkStatus();
  }
  std::vector<std::optional<absl::StatusOr<double>>> results(count);
  std::mutex mu;
  std::condition_variable cv;
  std::atomic<size_t> next{0};
  std::atomic<bool> failed{false};
  auto worker = [&] {
    while (!failed.load()) {
      const size_t i = next.fetch_add(1);
      if (i >= count) return;
      absl::StatusOr<double> r = task(i);
      if (!r.ok()) failed.store(true);
      {
        std::lock_guard<std::mutex> lock(mu);
        results[i] = std::move(r);
      }
      cv.notify_one();
    }
  };
  std::vector<std::jthread> pool;
  for (int t = 0; t < threads; ++t) pool.emplace_back(worker);

  absl::Status status = absl::OkStatus();
  for (size_t i = 0; i < count; ++i) {
    std::unique_lock<std::mutex> lock(mu);
    // Every index up to the first failure has been issued, so this wait
    // always ends.
    cv.wait(lock, [&] { return results[i].has_value(); });
    absl::StatusOr<double> r = *results[i];
    lock.unlock();
    if (!r.ok()) {
      status = r.status();
      break;
    }
    emit(i, *r);
  }
  failed.store(true);
  return status;
}

}  // namespace

absl::StatusOr<ExperimentReport> RunExperiment(
    const ExperimentConfig& config, std::span<const CheckIn> checkins,
    const RunOptions& options) {
  MLDP_RETURN_IF_ERROR(config.Validate());
  MLDP_ASSIGN_OR_RETURN(MetricSpace grid_space, BuildGrid(config.grid));
  const auto space =
      std::make_shared<const MetricSpace>(std::move(grid_space));
  const Rng master(config.seed);

  ExperimentReport report;
  report.parsed_records = checkins.size();
  const CellAssignment assignment = ToCells(checkins, config.grid);
  report.out_of_bounds = assignment.out_of_bounds;

  Rng prefix_rng = master.Derive("prefixes");
  MLDP_ASSIGN_OR_RETURN(
      const PrefixSequence prefixes,
      MakePrefixes(assignment.cells, config.sample_size, config.step,
                   prefix_rng));

  MLDP_ASSIGN_OR_RETURN(const Histogram full_sample,
                        Histogram::FromCells(prefixes.cell_ids(), space->size()));
  MLDP_ASSIGN_OR_RETURN(const Distribution empirical, Normalize(full_sample));
  const Distribution uniform = Distribution::Uniform(space->size());

  std::vector<Channel> channels;
  for (Mechanism family : config.mechanisms) {
    for (CalibrationPrior prior :
         {CalibrationPrior::kUniform, CalibrationPrior::kEmpirical}) {
      const bool used = prior == config.calibration_prior;
      absl::StatusOr<CalibrationResult> result = CalibrateForExperiment(
          config, family, space,
          prior == CalibrationPrior::kUniform ? uniform : empirical);
      if (!result.ok()) {
        if (used) return result.status();
        report.calibration_notes.push_back(absl::StrCat(
            MechanismName(family), " under ", PriorName(prior),
            " prior: ", result.status().message()));
        continue;
      }
      report.calibrations.push_back({prior, *result, used});
      if (used) {
        MLDP_ASSIGN_OR_RETURN(
            Channel channel,
            ChannelForExperiment(config, family, space, result->epsilon));
        channels.push_back(std::move(channel));
      }
    }
  }

  if (options.on_calibrated) options.on_calibrated(report);

  const size_t num_mechanisms = config.mechanisms.size();
  const size_t num_prefixes = prefixes.num_prefixes();
  std::vector<Histogram> sources;
  for (size_t k = 0; k < num_prefixes; ++k) {
    MLDP_ASSIGN_OR_RETURN(
        Histogram h, Histogram::FromCells(prefixes.prefix(k), space->size()));
    sources.push_back(std::move(h));
  }

  UtilityLossOptions loss_options;
  loss_options.trials = config.trials;
  loss_options.em.l1_tol = config.em_l1_tol;
  loss_options.em.max_iter = config.em_max_iter;

  std::vector<double> stddevs(num_prefixes * num_mechanisms, 0.0);
  auto task = [&](size_t index) -> absl::StatusOr<double> {
    const size_t k = index / num_mechanisms;
    const size_t m = index % num_mechanisms;
    const Rng rng = master.Derive(absl::StrCat(
        "utility/", MechanismName(config.mechanisms[m]), "/", k));
    MLDP_ASSIGN_OR_RETURN(
        const UtilityLoss loss,
        EstimateUtilityLoss(channels[m], sources[k], rng, loss_options));
    stddevs[index] = loss.stddev;
    return loss.mean;
  };
  CurvePoint pending;
  auto emit = [&](size_t index, double mean) {
    const size_t k = index / num_mechanisms;
    const size_t m = index % num_mechanisms;
    if (m == 0) pending = {prefixes.prefix_size(k), {}, {}};
    pending.mean.push_back(mean);
    pending.stddev.push_back(stddevs[index]);
    if (m + 1 == num_mechanisms) {
      report.curve.push_back(pending);
      if (options.on_point) options.on_point(pending);
    }
  };
  int threads = options.threads;
  if (threads == 0) {
    threads = std::max(1, static_cast<int>(std::thread::hardware_concurrency()));
  }
  MLDP_RETURN_IF_ERROR(
      RunOrdered(num_prefixes * num_mechanisms, threads, task, emit));
  return report;
}

std::string ProvenanceComment(const ExperimentConfig& config) {
  return absl::StrFormat("# config_hash=%016x seed=%d", config.Hash(),
                         config.seed);
}

std::string FormatCalibrationCsv(const ExperimentConfig& config,
                                 const ExperimentReport& report) {
  std::string out = ProvenanceComment(config);
  absl::StrAppend(&out, "\nprior,", CalibrationResult::CsvHeader(), ",used\n");
  for (const CalibrationRow& row : report.calibrations) {
    absl::StrAppend(&out, PriorName(row.prior), ",", row.result.ToCsvRow(), ",",
                    row.used ? 1 : 0, "\n");
  }
  for (const std::string& note : report.calibration_notes) {
    absl::StrAppend(&out, "# ", note, "\n");
  }
  return out;
}

std::string CurveCsvHeader(const ExperimentConfig& config) {
  std::string out = ProvenanceComment(config);
  absl::StrAppend(&out, "\nn");
  for (Mechanism m : config.mechanisms) {
    absl::StrAppend(&out, ",", MechanismName(m), "_mean");
    if (config.trials > 1) absl::StrAppend(&out, ",", MechanismName(m), "_sd");
  }
  out.push_back('\n');
  return out;
}

std::string FormatCurveRow(const ExperimentConfig& config,
                           const CurvePoint& point) {
  std::string out = absl::StrCat(point.n);
  for (size_t m = 0; m < point.mean.size(); ++m) {
    absl::StrAppendFormat(&out, ",%.17g", point.mean[m]);
    if (config.trials > 1) absl::StrAppendFormat(&out, ",%.17g", point.stddev[m]);
  }
  out.push_back('\n');
  return out;
}

std::string FormatCurveDat(const ExperimentConfig& config,
                           std::span<const CurvePoint> curve) {
  std::string out = ProvenanceComment(config);
  out.push_back('\n');
  for (size_t m = 0; m < config.mechanisms.size(); ++m) {
    if (m > 0) out += "\n\n";
    absl::StrAppend(&out, "# mechanism ", MechanismName(config.mechanisms[m]),
                    "\n# n utility_loss_m stddev_m\n");
    for (const CurvePoint& point : curve) {
      absl::StrAppendFormat(&out, "%d %.10g %.10g\n", point.n, point.mean[m],
                            point.stddev[m]);
    }
  }
  return out;
}

}  // namespace mldp
