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

#include "mldp/metric_space.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <utility>

#include "absl/strings/str_cat.h"
#include "mldp/random.h"

namespace mldp {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

}  // namespace

absl::Status GridSpec::Validate() const {
  if (!(width_m > 0.0) || !(height_m > 0.0) || !std::isfinite(width_m) ||
      !std::isfinite(height_m)) {
    return absl::InvalidArgumentError(
        absl::StrCat("grid dimensions must be positive, got ", width_m, " x ",
                     height_m, " m"));
  }
  if (rows == 0 || cols == 0) {
    return absl::InvalidArgumentError(
        absl::StrCat("grid must have at least one row and column, got ", rows,
                     " x ", cols));
  }
  if (!(center_lat >= -90.0 && center_lat <= 90.0) ||
      !(center_lon >= -180.0 && center_lon <= 180.0)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "grid center out of range: ", center_lat, ", ", center_lon));
  }
  return absl::OkStatus();
}

PlanarPoint ProjectToPlane(const GridSpec& spec, double lat, double lon) {
  const double cos_lat = std::cos(spec.center_lat * kDegToRad);
  return {kEarthRadiusM * (lon - spec.center_lon) * kDegToRad * cos_lat,
          kEarthRadiusM * (lat - spec.center_lat) * kDegToRad};
}

LatLon UnprojectFromPlane(const GridSpec& spec, PlanarPoint p) {
  const double cos_lat = std::cos(spec.center_lat * kDegToRad);
  return {spec.center_lat + p.y_m / kEarthRadiusM / kDegToRad,
          spec.center_lon + p.x_m / (kEarthRadiusM * cos_lat) / kDegToRad};
}

absl::StatusOr<MetricSpace> MetricSpace::FromMatrix(size_t size,
                                                    std::vector<double> dist) {
  if (size == 0) {
    return absl::InvalidArgumentError("metric space must be nonempty");
  }
  if (dist.size() != size * size) {
    return absl::InvalidArgumentError(
        absl::StrCat("distance matrix has ", dist.size(), " entries, expected ",
                     size * size));
  }
  for (size_t i = 0; i < size; ++i) {
    if (dist[i * size + i] != 0.0) {
      return absl::InvalidArgumentError(
          absl::StrCat("nonzero self-distance at point ", i));
    }
    for (size_t j = 0; j < size; ++j) {
      const double d = dist[i * size + j];
      if (!(d >= 0.0) || !std::isfinite(d)) {
        return absl::InvalidArgumentError(
            absl::StrCat("invalid distance d(", i, ",", j, ") = ", d));
      }
      if (d != dist[j * size + i]) {
        return absl::InvalidArgumentError(
            absl::StrCat("asymmetric distance between ", i, " and ", j));
      }
    }
  }
  return MetricSpace(size, std::move(dist));
}

absl::StatusOr<MetricSpace> MetricSpace::FromPoints(
    std::vector<PlanarPoint> points) {
  const size_t n = points.size();
  std::vector<double> dist(n * n, 0.0);
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = i + 1; j < n; ++j) {
      const double d = std::hypot(points[i].x_m - points[j].x_m,
                                  points[i].y_m - points[j].y_m);
      dist[i * n + j] = d;
      dist[j * n + i] = d;
    }
  }
  absl::StatusOr<MetricSpace> space = FromMatrix(n, std::move(dist));
  if (space.ok()) space->centers_ = std::move(points);
  return space;
}

absl::StatusOr<MetricSpace> MetricSpace::Discrete(size_t size) {
  std::vector<double> dist(size * size, 1.0);
  for (size_t i = 0; i < size; ++i) dist[i * size + i] = 0.0;
  return FromMatrix(size, std::move(dist));
}

double MetricSpace::Diameter() const {
  return dist_.empty() ? 0.0 : *std::max_element(dist_.begin(), dist_.end());
}

PlanarPoint CellCenter(const GridSpec& spec, PointId id) {
  const size_t row = id / spec.cols;
  const size_t col = id % spec.cols;
  return {-spec.width_m / 2 + (static_cast<double>(col) + 0.5) *
                                  spec.cell_width_m(),
          spec.height_m / 2 -
              (static_cast<double>(row) + 0.5) * spec.cell_height_m()};
}

absl::StatusOr<MetricSpace> BuildGrid(const GridSpec& spec) {
  if (absl::Status s = spec.Validate(); !s.ok()) return s;
  std::vector<PlanarPoint> centers(spec.size());
  for (PointId id = 0; id < centers.size(); ++id) {
    centers[id] = CellCenter(spec, id);
  }
  absl::StatusOr<MetricSpace> space = MetricSpace::FromPoints(centers);
  if (space.ok()) space->grid_ = spec;
  return space;
}

std::optional<PointId> LocatePlanar(const GridSpec& spec, PlanarPoint p) {
  const double from_west = p.x_m + spec.width_m / 2;
  const double from_north = spec.height_m / 2 - p.y_m;
  if (!(from_west >= 0.0) || !(from_north >= 0.0) ||
      !(from_west < spec.width_m) || !(from_north < spec.height_m)) {
    return std::nullopt;
  }
  // Clamp guards against rounding that lands exactly on the far edge.
  const size_t col = std::min(
      static_cast<size_t>(std::floor(from_west / spec.cell_width_m())),
      spec.cols - 1);
  const size_t row = std::min(
      static_cast<size_t>(std::floor(from_north / spec.cell_height_m())),
      spec.rows - 1);
  return row * spec.cols + col;
}

std::optional<PointId> Locate(const GridSpec& spec, double lat, double lon) {
  return LocatePlanar(spec, ProjectToPlane(spec, lat, lon));
}

double TriangleInequalityViolation(const MetricSpace& space,
                                   size_t exhaustive_limit, size_t samples,
                                   unsigned long long seed) {
  const size_t n = space.size();
  double worst = 0.0;
  auto check = [&](PointId a, PointId b, PointId c) {
    worst = std::max(worst, space.distance(a, c) - space.distance(a, b) -
                                space.distance(b, c));
  };
  if (n <= exhaustive_limit) {
    for (PointId a = 0; a < n; ++a)
      for (PointId b = 0; b < n; ++b)
        for (PointId c = 0; c < n; ++c) check(a, b, c);
    return worst;
  }
  Rng rng(seed);
  for (size_t s = 0; s < samples; ++s) {
    check(rng.UniformIndex(n), rng.UniformIndex(n), rng.UniformIndex(n));
  }
  return worst;
}

}  // namespace mldp
