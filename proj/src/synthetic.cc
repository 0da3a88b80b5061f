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

#include "mldp/synthetic.h"

#include <cmath>
#include <numbers>

#include "absl/strings/str_cat.h"

namespace mldp {

namespace {

// Box-Muller; one of the pair is discarded to keep the stream simple.
double StandardNormal(Rng& rng) {
  double u1;
  do {
    u1 = rng.UniformDouble();
  } while (u1 <= 0.0);
  const double u2 = rng.UniformDouble();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

PlanarPoint UniformInRectangle(const GridSpec& spec, Rng& rng) {
  return {(rng.UniformDouble() - 0.5) * spec.width_m,
          (rng.UniformDouble() - 0.5) * spec.height_m};
}

}  // namespace

std::vector<CheckIn> GenerateClusteredCheckIns(
    const GridSpec& spec, const ClusteredCheckInOptions& options, Rng& rng) {
  GridSpec inner = spec;
  inner.width_m *= options.hotspot_extent;
  inner.height_m *= options.hotspot_extent;
  std::vector<PlanarPoint> centers;
  std::vector<double> cumulative_weight;
  double total_weight = 0.0;
  for (size_t c = 0; c < std::max<size_t>(options.clusters, 1); ++c) {
    centers.push_back(UniformInRectangle(inner, rng));
    total_weight += 0.2 + rng.UniformDouble();
    cumulative_weight.push_back(total_weight);
  }

  std::vector<CheckIn> out;
  out.reserve(options.records);
  while (out.size() < options.records) {
    PlanarPoint p;
    if (rng.UniformDouble() < options.background_fraction) {
      p = UniformInRectangle(spec, rng);
    } else {
      const double pick = rng.UniformDouble() * total_weight;
      size_t c = 0;
      while (c + 1 < centers.size() && pick >= cumulative_weight[c]) ++c;
      p = {centers[c].x_m + options.cluster_sigma_m * StandardNormal(rng),
           centers[c].y_m + options.cluster_sigma_m * StandardNormal(rng)};
      if (!LocatePlanar(spec, p).has_value()) continue;
    }
    const LatLon ll = UnprojectFromPlane(spec, p);
    const size_t k = out.size();
    out.push_back({absl::StrCat("u", k % 97), "2010-10-19T23:55:27Z", ll.lat,
                   ll.lon, absl::StrCat("loc", k)});
  }
  return out;
}

}  // namespace mldp
