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


// mldp: command-line front end for the metric LDP toolkit.
//
//   mldp calibrate   --config c.txt [--input checkins.txt] [--out dir]
//   mldp channel     --config c.txt --family geometric [--epsilon e]
//   mldp sanitize    --config c.txt --channel ch.csv --input cells.csv --seed 7
//   mldp reconstruct --config c.txt --channel ch.csv --input noisy.csv
//   mldp emd         --config c.txt --a a.csv --b b.csv [--out dir]
//   mldp experiment  --config c.txt --input checkins.txt --out dir
//   mldp verify      --config c.txt --channel ch.csv --epsilon e
//   mldp cells       --config c.txt --input checkins.txt [--histogram]
//   mldp synth       --config c.txt --seed 7 [--records 750]
//
// Exit status: 0 on success, 2 on a usage error, 1 on a runtime error.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "mldp/calibration.h"
#include "mldp/channel.h"
#include "mldp/csv_io.h"
#include "mldp/distribution.h"
#include "mldp/experiment.h"
#include "mldp/ingestion.h"
#include "mldp/metric_space.h"
#include "mldp/random.h"
#include "mldp/reconstruction.h"
#include "mldp/status_macros.h"
#include "mldp/synthetic.h"
#include "mldp/transport.h"

namespace mldp {
namespace {

struct CommonFlags {
  std::string config_path;
  std::string input_path;
  std::string out_dir;
  std::optional<uint64_t> seed;
  std::optional<int> trials;
};

absl::StatusOr<std::string> ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open ", path));
  std::ostringstream text;
  text << in.rdbuf();
  if (in.bad()) return absl::DataLossError(absl::StrCat("cannot read ", path));
  return text.str();
}

absl::Status WriteFile(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << contents;
  out.close();
  if (!out) return absl::InternalError(absl::StrCat("cannot write ", path));
  return absl::OkStatus();
}

absl::StatusOr<ExperimentConfig> LoadConfig(const CommonFlags& flags) {
  ExperimentConfig config;
  if (!flags.config_path.empty()) {
    MLDP_ASSIGN_OR_RETURN(const std::string text, ReadFile(flags.config_path));
    MLDP_ASSIGN_OR_RETURN(config, ExperimentConfig::Parse(text));
  }
  if (flags.seed) config.seed = *flags.seed;
  if (flags.trials) config.trials = *flags.trials;
  MLDP_RETURN_IF_ERROR(config.Validate());
  return config;
}

// Writes to <out_dir>/<name>, or to stdout when no directory was given.
absl::Status Emit(const CommonFlags& flags, const std::string& name,
                  const std::string& contents) {
  if (flags.out_dir.empty()) {
    std::cout << contents;
    std::cout.flush();
    return std::cout ? absl::OkStatus()
                     : absl::InternalError("cannot write to stdout");
  }
  std::error_code ec;
  std::filesystem::create_directories(flags.out_dir, ec);
  if (ec) {
    return absl::InternalError(
        absl::StrCat("cannot create ", flags.out_dir, ": ", ec.message()));
  }
  return WriteFile((std::filesystem::path(flags.out_dir) / name).string(),
                   contents);
}

absl::StatusOr<std::shared_ptr<const MetricSpace>> GridSpace(
    const ExperimentConfig& config) {
  MLDP_ASSIGN_OR_RETURN(MetricSpace space, BuildGrid(config.grid));
  return std::make_shared<const MetricSpace>(std::move(space));
}

absl::StatusOr<Channel> LoadChannel(
    const std::string& path, std::shared_ptr<const MetricSpace> space) {
  std::ifstream in(path);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open ", path));
  return ParseChannelCsv(in, std::move(space));
}

// Accepts either a "cell,count" histogram or a "cell" list.
absl::StatusOr<Histogram> LoadHistogram(const std::string& path, size_t size) {
  MLDP_ASSIGN_OR_RETURN(const std::string text, ReadFile(path));
  std::istringstream probe(text);
  std::string line;
  bool histogram = false;
  while (std::getline(probe, line)) {
    if (line.empty() || line[0] == '#') continue;
    histogram = line.find(',') != std::string::npos;
    break;
  }
  std::istringstream in(text);
  if (histogram) return ParseHistogramCsv(in, size);
  MLDP_ASSIGN_OR_RETURN(const std::vector<PointId> cells, ParseCellList(in));
  return Histogram::FromCells(cells, size);
}

absl::StatusOr<std::vector<CheckIn>> LoadCheckIns(const std::string& path) {
  std::ifstream in(path);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open ", path));
  MLDP_ASSIGN_OR_RETURN(ParsedCheckIns parsed, ParseCheckIns(in));
  if (!parsed.rejected_lines.empty()) {
    std::cerr << "warning: " << parsed.rejected_lines.size()
              << " malformed line(s) skipped, first at line "
              << parsed.rejected_lines.front() << "\n";
  }
  return std::move(parsed.checkins);
}

absl::Status RunCalibrate(const CommonFlags& flags,
                          const std::vector<std::string>& families) {
  MLDP_ASSIGN_OR_RETURN(ExperimentConfig config, LoadConfig(flags));
  if (!families.empty()) {
    config.mechanisms.clear();
    for (const std::string& name : families) {
      MLDP_ASSIGN_OR_RETURN(Mechanism m, ParseMechanism(name));
      config.mechanisms.push_back(m);
    }
    MLDP_RETURN_IF_ERROR(config.Validate());
  }
  MLDP_ASSIGN_OR_RETURN(auto space, GridSpace(config));
  Distribution prior = Distribution::Uniform(space->size());
  if (config.calibration_prior == CalibrationPrior::kEmpirical) {
    if (flags.input_path.empty()) {
      return absl::InvalidArgumentError(
          "empirical calibration prior needs --input");
    }
    MLDP_ASSIGN_OR_RETURN(const std::vector<CheckIn> checkins,
                          LoadCheckIns(flags.input_path));
    const CellAssignment assignment = ToCells(checkins, config.grid);
    MLDP_ASSIGN_OR_RETURN(const Histogram h,
                          Histogram::FromCells(assignment.cells, space->size()));
    MLDP_ASSIGN_OR_RETURN(prior, Normalize(h));
  }
  std::string out = ProvenanceComment(config);
  absl::StrAppend(&out, "\n", CalibrationResult::CsvHeader(), "\n");
  for (Mechanism family : config.mechanisms) {
    MLDP_ASSIGN_OR_RETURN(const CalibrationResult result,
                          CalibrateForExperiment(config, family, space, prior));
    absl::StrAppend(&out, result.ToCsvRow(), "\n");
  }
  return Emit(flags, "calibration.csv", out);
}

absl::Status RunChannel(const CommonFlags& flags, const std::string& family,
                        std::optional<double> epsilon) {
  MLDP_ASSIGN_OR_RETURN(const ExperimentConfig config, LoadConfig(flags));
  MLDP_ASSIGN_OR_RETURN(const Mechanism m, ParseMechanism(family));
  MLDP_ASSIGN_OR_RETURN(auto space, GridSpace(config));
  if (!epsilon) {
    MLDP_ASSIGN_OR_RETURN(
        const CalibrationResult result,
        CalibrateForExperiment(config, m, space,
                               Distribution::Uniform(space->size())));
    epsilon = result.epsilon;
  }
  MLDP_ASSIGN_OR_RETURN(const Channel channel,
                        ChannelForExperiment(config, m, space, *epsilon));
  return Emit(flags, "channel.csv",
              absl::StrCat(ProvenanceComment(config), "\n",
                           FormatChannelCsv(channel)));
}

absl::Status RunSanitize(const CommonFlags& flags,
                         const std::string& channel_path) {
  MLDP_ASSIGN_OR_RETURN(const ExperimentConfig config, LoadConfig(flags));
  MLDP_ASSIGN_OR_RETURN(auto space, GridSpace(config));
  MLDP_ASSIGN_OR_RETURN(const Channel channel, LoadChannel(channel_path, space));
  MLDP_ASSIGN_OR_RETURN(const std::string text, ReadFile(flags.input_path));
  std::istringstream in(text);
  MLDP_ASSIGN_OR_RETURN(const std::vector<PointId> cells, ParseCellList(in));
  for (PointId c : cells) {
    if (c >= channel.size()) {
      return absl::InvalidArgumentError(
          absl::StrCat("cell ", c, " outside a space of ", channel.size()));
    }
  }
  Rng rng = Rng(config.seed).Derive("sanitize");
  const std::vector<PointId> noisy =
      ChannelSampler(channel).SanitizeAll(cells, rng);
  return Emit(flags, "noisy.csv",
              absl::StrCat(ProvenanceComment(config), "\n",
                           FormatCellList(noisy)));
}

absl::Status RunReconstruct(const CommonFlags& flags,
                            const std::string& channel_path) {
  MLDP_ASSIGN_OR_RETURN(const ExperimentConfig config, LoadConfig(flags));
  MLDP_ASSIGN_OR_RETURN(auto space, GridSpace(config));
  MLDP_ASSIGN_OR_RETURN(const Channel channel, LoadChannel(channel_path, space));
  MLDP_ASSIGN_OR_RETURN(const Histogram noisy,
                        LoadHistogram(flags.input_path, space->size()));
  EmOptions options;
  options.l1_tol = config.em_l1_tol;
  options.max_iter = config.em_max_iter;
  MLDP_ASSIGN_OR_RETURN(const EmResult result,
                        EmReconstruct(channel, noisy, std::nullopt, options));
  return Emit(flags, "em.csv",
              absl::StrCat(ProvenanceComment(config), "\n", result.CsvHeader(),
                           "\n", result.ToCsvRow(), "\n"));
}

absl::Status RunEmd(const CommonFlags& flags, const std::string& a_path,
                    const std::string& b_path) {
  MLDP_ASSIGN_OR_RETURN(const ExperimentConfig config, LoadConfig(flags));
  MLDP_ASSIGN_OR_RETURN(auto space, GridSpace(config));
  MLDP_ASSIGN_OR_RETURN(const Histogram ha, LoadHistogram(a_path, space->size()));
  MLDP_ASSIGN_OR_RETURN(const Histogram hb, LoadHistogram(b_path, space->size()));
  MLDP_ASSIGN_OR_RETURN(const Distribution a, Normalize(ha));
  MLDP_ASSIGN_OR_RETURN(const Distribution b, Normalize(hb));
  MLDP_ASSIGN_OR_RETURN(const TransportPlan plan, Emd(*space, a, b));
  std::cout << absl::StrFormat("%.17g\n", plan.cost);
  if (!flags.out_dir.empty()) {
    MLDP_RETURN_IF_ERROR(Emit(flags, "plan.csv",
                              absl::StrCat(ProvenanceComment(config), "\n",
                                           plan.ToCsv())));
  }
  return absl::OkStatus();
}

absl::Status RunVerify(const CommonFlags& flags,
                       const std::string& channel_path, double epsilon,
                       const std::string& metric) {
  MLDP_ASSIGN_OR_RETURN(const ExperimentConfig config, LoadConfig(flags));
  MLDP_ASSIGN_OR_RETURN(auto space, GridSpace(config));
  MLDP_ASSIGN_OR_RETURN(const Channel channel, LoadChannel(channel_path, space));
  double violation = 0.0;
  if (metric == "grid") {
    violation = DxPrivacyViolation(channel, epsilon);
  } else {
    MLDP_ASSIGN_OR_RETURN(const MetricSpace discrete,
                          MetricSpace::Discrete(channel.size()));
    MLDP_ASSIGN_OR_RETURN(violation,
                          DxPrivacyViolation(channel, epsilon, discrete));
  }
  return Emit(flags, "verify.csv",
              absl::StrFormat("%s\nmetric,epsilon,max_violation,satisfied\n"
                              "%s,%.17g,%.17g,%d\n",
                              ProvenanceComment(config), metric, epsilon,
                              violation, violation <= 1e-9 ? 1 : 0));
}

absl::Status RunExperimentCommand(const CommonFlags& flags, int threads) {
  MLDP_ASSIGN_OR_RETURN(const ExperimentConfig config, LoadConfig(flags));
  MLDP_ASSIGN_OR_RETURN(const std::vector<CheckIn> checkins,
                        LoadCheckIns(flags.input_path));
  std::error_code ec;
  std::filesystem::create_directories(flags.out_dir, ec);
  if (ec) {
    return absl::InternalError(
        absl::StrCat("cannot create ", flags.out_dir, ": ", ec.message()));
  }
  const std::filesystem::path dir(flags.out_dir);

  std::ofstream curve((dir / "curve.csv").string(),
                      std::ios::binary | std::ios::trunc);
  if (!curve) return absl::InternalError("cannot write curve.csv");
  curve << CurveCsvHeader(config) << std::flush;

  absl::Status calibration_written = absl::OkStatus();
  RunOptions options;
  options.threads = threads;
  options.on_calibrated = [&](const ExperimentReport& report) {
    calibration_written = WriteFile((dir / "calibration.csv").string(),
                                    FormatCalibrationCsv(config, report));
  };
  options.on_point = [&](const CurvePoint& point) {
    curve << FormatCurveRow(config, point) << std::flush;
  };
  MLDP_ASSIGN_OR_RETURN(const ExperimentReport report,
                        RunExperiment(config, checkins, options));
  MLDP_RETURN_IF_ERROR(calibration_written);
  curve.close();
  if (!curve) return absl::InternalError("cannot write curve.csv");
  MLDP_RETURN_IF_ERROR(WriteFile((dir / "curve.dat").string(),
                                 FormatCurveDat(config, report.curve)));
  std::cerr << absl::StrFormat(
      "records=%d out_of_bounds=%d points=%d\n", report.parsed_records,
      report.out_of_bounds, report.curve.size());
  return absl::OkStatus();
}

absl::Status RunCells(const CommonFlags& flags, bool histogram) {
  MLDP_ASSIGN_OR_RETURN(const ExperimentConfig config, LoadConfig(flags));
  MLDP_ASSIGN_OR_RETURN(const std::vector<CheckIn> checkins,
                        LoadCheckIns(flags.input_path));
  const CellAssignment assignment = ToCells(checkins, config.grid);
  std::string body;
  if (histogram) {
    MLDP_ASSIGN_OR_RETURN(
        const Histogram h,
        Histogram::FromCells(assignment.cells, config.grid.size()));
    body = FormatHistogramCsv(h);
  } else {
    body = FormatCellList(assignment.cells);
  }
  return Emit(flags, histogram ? "histogram.csv" : "cells.csv",
              absl::StrCat(ProvenanceComment(config), "\n", body));
}

absl::Status RunSynth(const CommonFlags& flags,
                      const ClusteredCheckInOptions& options) {
  MLDP_ASSIGN_OR_RETURN(const ExperimentConfig config, LoadConfig(flags));
  Rng rng = Rng(config.seed).Derive("synthetic");
  std::string out;
  for (const CheckIn& c : GenerateClusteredCheckIns(config.grid, options, rng)) {
    absl::StrAppend(&out, FormatCheckIn(c), "\n");
  }
  return Emit(flags, "checkins.txt", out);
}

int Main(int argc, char** argv) {
  CLI::App app{"Metric local differential privacy toolkit"};
  app.require_subcommand(1);
  CommonFlags flags;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", flags.config_path, "key = value config file")
        ->check(CLI::ExistingFile);
    sub->add_option("--input", flags.input_path, "Input file");
    sub->add_option("--out", flags.out_dir, "Output directory");
    sub->add_option("--seed", flags.seed, "Master seed (overrides config)");
    sub->add_option("--trials", flags.trials,
                    "Trials per point (overrides config)")
        ->check(CLI::PositiveNumber);
  };

  std::vector<std::string> families;
  CLI::App* calibrate =
      app.add_subcommand("calibrate", "Calibrate mechanisms to the target");
  add_common(calibrate);
  calibrate->add_option("--family", families,
                        "flat, geometric or laplacian (default: config)");

  std::string family;
  std::optional<double> epsilon;
  CLI::App* channel = app.add_subcommand("channel", "Write a channel matrix");
  add_common(channel);
  channel->add_option("--family", family, "flat, geometric or laplacian")
      ->required();
  channel->add_option("--epsilon", epsilon,
                      "Privacy parameter (default: calibrated)");

  std::string channel_path;
  CLI::App* sanitize = app.add_subcommand("sanitize", "Obfuscate a cell list");
  add_common(sanitize);
  sanitize->add_option("--channel", channel_path, "Channel CSV")->required();
  sanitize->get_option("--input")->required();

  CLI::App* reconstruct =
      app.add_subcommand("reconstruct", "EM estimate from noisy reports");
  add_common(reconstruct);
  reconstruct->add_option("--channel", channel_path, "Channel CSV")->required();
  reconstruct->get_option("--input")->required();

  std::string a_path, b_path;
  CLI::App* emd = app.add_subcommand("emd", "Earth mover's distance");
  add_common(emd);
  emd->add_option("--a", a_path, "First histogram or cell list")->required();
  emd->add_option("--b", b_path, "Second histogram or cell list")->required();

  int threads = 1;
  CLI::App* experiment =
      app.add_subcommand("experiment", "Utility loss versus sample size");
  add_common(experiment);
  experiment->get_option("--input")->required();
  experiment->get_option("--out")->required();
  experiment->add_option("--threads", threads, "Worker threads, 0 = all cores")
      ->check(CLI::NonNegativeNumber);

  double verify_epsilon = 0.0;
  std::string metric = "grid";
  CLI::App* verify = app.add_subcommand("verify", "Check eps*d privacy");
  add_common(verify);
  verify->add_option("--channel", channel_path, "Channel CSV")->required();
  verify->add_option("--epsilon", verify_epsilon, "Privacy parameter")
      ->required()
      ->check(CLI::NonNegativeNumber);
  verify->add_option("--metric", metric, "grid or discrete")
      ->check(CLI::IsMember({"grid", "discrete"}));

  bool histogram = false;
  CLI::App* cells = app.add_subcommand("cells", "Assign check-ins to cells");
  add_common(cells);
  cells->get_option("--input")->required();
  cells->add_flag("--histogram", histogram, "Write counts per cell");

  ClusteredCheckInOptions synth_options;
  CLI::App* synth =
      app.add_subcommand("synth", "Generate clustered synthetic check-ins");
  add_common(synth);
  synth->add_option("--records", synth_options.records, "Number of records");
  synth->add_option("--clusters", synth_options.clusters, "Number of hot spots");
  synth->add_option("--sigma", synth_options.cluster_sigma_m,
                    "Hot spot standard deviation, meters");
  synth->add_option("--background", synth_options.background_fraction,
                    "Fraction of records spread uniformly")
      ->check(CLI::Range(0.0, 1.0));
  synth->add_option("--extent", synth_options.hotspot_extent,
                    "Fraction of the rectangle holding hot spot centers")
      ->check(CLI::Range(0.0, 1.0));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  absl::Status status;
  if (*calibrate) {
    status = RunCalibrate(flags, families);
  } else if (*channel) {
    status = RunChannel(flags, family, epsilon);
  } else if (*sanitize) {
    status = RunSanitize(flags, channel_path);
  } else if (*reconstruct) {
    status = RunReconstruct(flags, channel_path);
  } else if (*emd) {
    status = RunEmd(flags, a_path, b_path);
  } else if (*experiment) {
    status = RunExperimentCommand(flags, threads);
  } else if (*verify) {
    status = RunVerify(flags, channel_path, verify_epsilon, metric);
  } else if (*cells) {
    status = RunCells(flags, histogram);
  } else if (*synth) {
    status = RunSynth(flags, synth_options);
  }
  if (!status.ok()) {
    std::cerr << "error: " << status.message() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace
}  // namespace mldp

int main(int argc, char** argv) { return mldp::Main(argc, argv); }
