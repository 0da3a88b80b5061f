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

#ifndef MLDP_UTILITY_LOSS_H_
#define MLDP_UTILITY_LOSS_H_

#include <span>
#include <vector>

#include "absl/status/statusor.h"
#include "mldp/channel.h"
#include "mldp/distribution.h"
#include "mldp/random.h"
#include "mldp/reconstruction.h"

namespace mldp {

struct UtilityLossOptions {
  int trials = 1;
  EmOptions em;
};

struct UtilityLoss {
  double mean = 0.0;
  // Sample standard deviation; 0 for a single trial.
  double stddev = 0.0;
  std::vector<double> per_trial;
};

// Expected Kantorovich distance between the EM reconstruction from a
// sanitized copy of `source` and the true distribution of `source`,
// estimated over `trials` independent sanitizations. Trial t draws from
// rng.Derive("trial/<t>"), so results do not depend on evaluation order.
absl::StatusOr<UtilityLoss> EstimateUtilityLoss(
    const Channel& channel, const Histogram& source, const Rng& rng,
    const UtilityLossOptions& options = {});

// One trial: sanitize every record, reconstruct, measure.
absl::StatusOr<double> UtilityLossTrial(const Channel& channel,
                                        const ChannelSampler& sampler,
                                        std::span<const PointId> records,
                                        const Distribution& truth, Rng& rng,
                                        const EmOptions& em);

}  // namespace mldp

#endif  // MLDP_UTILITY_LOSS_H_
