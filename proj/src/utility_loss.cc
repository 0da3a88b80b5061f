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

#include "mldp/utility_loss.h"

#include <cmath>

#include "absl/strings/str_cat.h"
#include "mldp/status_macros.h"
#include "mldp/transport.h"

namespace mldp {

absl::StatusOr<double> UtilityLossTrial(const Channel& channel,
                                        const ChannelSampler& sampler,
                                        std::span<const PointId> records,
                                        const Distribution& truth, Rng& rng,
                                        const EmOptions& em) {
  const std::vector<PointId> noisy_records = sampler.SanitizeAll(records, rng);
  MLDP_ASSIGN_OR_RETURN(const Histogram noisy,
                        Histogram::FromCells(noisy_records, channel.size()));
  MLDP_ASSIGN_OR_RETURN(const EmResult em_result,
                        EmReconstruct(channel, noisy, std::nullopt, em));
  MLDP_ASSIGN_OR_RETURN(const TransportPlan plan,
                        Emd(channel.space(), em_result.estimate, truth));
  return plan.cost;
}

absl::StatusOr<UtilityLoss> EstimateUtilityLoss(
    const Channel& channel, const Histogram& source, const Rng& rng,
    const UtilityLossOptions& options) {
  if (options.trials < 1) {
    return absl::InvalidArgumentError(
        absl::StrCat("trials must be positive, got ", options.trials));
  }
  if (source.size() != channel.size()) {
    return absl::InvalidArgumentError(
        absl::StrCat("source histogram has ", source.size(),
                     " cells, channel has ", channel.size()));
  }
  MLDP_ASSIGN_OR_RETURN(const Distribution truth, Normalize(source));

  std::vector<PointId> records;
  records.reserve(source.total());
  for (PointId id = 0; id < source.size(); ++id) {
    records.insert(records.end(), source[id], id);
  }

  const ChannelSampler sampler(channel);
  UtilityLoss loss;
  for (int t = 0; t < options.trials; ++t) {
    Rng trial_rng = rng.Derive(absl::StrCat("trial/", t));
    MLDP_ASSIGN_OR_RETURN(const double cost,
                          UtilityLossTrial(channel, sampler, records, truth,
                                           trial_rng, options.em));
    loss.per_trial.push_back(cost);
  }
  double sum = 0.0;
  for (double c : loss.per_trial) sum += c;
  loss.mean = sum / options.trials;
  if (options.trials > 1) {
    double sq = 0.0;
    for (double c : loss.per_trial) sq += (c - loss.mean) * (c - loss.mean);
    loss.stddev = std::sqrt(sq / (options.trials - 1));
  }
  return loss;
}

}  // namespace mldp
