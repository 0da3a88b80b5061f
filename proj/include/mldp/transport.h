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

#ifndef MLDP_TRANSPORT_H_
#define MLDP_TRANSPORT_H_

#include <span>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "mldp/distribution.h"
#include "mldp/metric_space.h"

namespace mldp {

struct FlowArc {
  PointId source = 0;
  PointId target = 0;
  double mass = 0.0;
};

// An optimal coupling between two distributions and its cost in meters.
struct TransportPlan {
  std::vector<FlowArc> flow;
  double cost = 0.0;

  // "# cost=<cost>" followed by "source,target,mass" rows.
  std::string ToCsv() const;
};

// Exact earth mover's (Kantorovich, 1-Wasserstein) distance under the ground
// distance of `space`. Solved as an uncapacitated transportation problem
// with the network simplex method on the bipartite graph between the
// positive-mass points of `a` and of `b`.
absl::StatusOr<TransportPlan> Emd(const MetricSpace& space,
                                  const Distribution& a,
                                  const Distribution& b);

namespace internal {

// Network simplex for min sum cost[i*targets+j] * flow[i][j] subject to row
// sums `supply` and column sums `demand`. Both must be positive and have
// equal totals up to rounding. Returns the dense flow matrix.
std::vector<double> SolveTransportation(std::span<const double> supply,
                                        std::span<const double> demand,
                                        std::span<const double> cost);

}  // namespace internal
}  // namespace mldp

#endif  // MLDP_TRANSPORT_H_
