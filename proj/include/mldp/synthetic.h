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

#ifndef MLDP_SYNTHETIC_H_
#define MLDP_SYNTHETIC_H_

#include <vector>

#include "mldp/ingestion.h"
#include "mldp/metric_space.h"
#include "mldp/random.h"

namespace mldp {

// Shape of a synthetic check-in population: a few Gaussian hot spots over a
// thin uniform background, all inside the grid rectangle.
struct ClusteredCheckInOptions {
  size_t records = 750;
  size_t clusters = 6;
  // Standard deviation of each hot spot, meters.
  double cluster_sigma_m = 250.0;
  // Share of records drawn uniformly over the rectangle.
  double background_fraction = 0.1;
  // Hot spot centers are drawn uniformly from the central part of the
  // rectangle spanning this fraction of its width and height.
  double hotspot_extent = 0.7;
};

// Records in Gowalla line format with user ids "u<k>", a fixed timestamp
// and location ids "loc<k>". Deterministic given `rng`.
std::vector<CheckIn> GenerateClusteredCheckIns(
    const GridSpec& spec, const ClusteredCheckInOptions& options, Rng& rng);

}  // namespace mldp

#endif  // MLDP_SYNTHETIC_H_
