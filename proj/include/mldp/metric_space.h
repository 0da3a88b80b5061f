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

#ifndef MLDP_METRIC_SPACE_H_
#define MLDP_METRIC_SPACE_H_

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"

namespace mldp {

// Index of a point of a finite metric space. For grids, id = row * cols + col
// with row 0 along the north edge and column 0 along the west edge.
using PointId = size_t;

// Mean Earth radius used by the local equirectangular projection.
inline constexpr double kEarthRadiusM = 6371000.0;

// A geographic rectangle split into rows x cols equal cells.
struct GridSpec {
  double center_lat = 48.8606;
  double center_lon = 2.3481;
  double width_m = 4500.0;
  double height_m = 4500.0;
  size_t rows = 30;
  size_t cols = 30;

  double cell_width_m() const { return width_m / static_cast<double>(cols); }
  double cell_height_m() const { return height_m / static_cast<double>(rows); }
  size_t size() const { return rows * cols; }

  absl::Status Validate() const;

  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

// Planar coordinates in meters east / north of a grid center.
struct PlanarPoint {
  double x_m = 0.0;
  double y_m = 0.0;

  friend bool operator==(const PlanarPoint&, const PlanarPoint&) = default;
};

struct LatLon {
  double lat = 0.0;
  double lon = 0.0;
};

PlanarPoint ProjectToPlane(const GridSpec& spec, double lat, double lon);
LatLon UnprojectFromPlane(const GridSpec& spec, PlanarPoint p);

// A finite set of points with a symmetric, nonnegative ground distance in
// meters. Immutable once built.
class MetricSpace {
 public:
  // Validates a dense row-major n x n matrix: zero diagonal, symmetry and
  // nonnegativity. The triangle inequality is checked separately by
  // CheckTriangleInequality since it is cubic in n.
  static absl::StatusOr<MetricSpace> FromMatrix(size_t size,
                                                std::vector<double> dist);

  // Euclidean distances between planar points.
  static absl::StatusOr<MetricSpace> FromPoints(
      std::vector<PlanarPoint> points);

  // d(x, y) = 1 for x != y. The metric under which d_X-privacy is LDP.
  static absl::StatusOr<MetricSpace> Discrete(size_t size);

  size_t size() const { return size_; }
  double distance(PointId a, PointId b) const { return dist_[a * size_ + b]; }
  std::span<const double> row(PointId a) const {
    return {dist_.data() + a * size_, size_};
  }
  std::span<const double> matrix() const { return dist_; }

  const std::optional<std::vector<PlanarPoint>>& centers() const {
    return centers_;
  }
  // Set when the space was produced by BuildGrid.
  const std::optional<GridSpec>& grid() const { return grid_; }

  double Diameter() const;

 private:
  friend absl::StatusOr<MetricSpace> BuildGrid(const GridSpec& spec);

  MetricSpace(size_t size, std::vector<double> dist)
      : size_(size), dist_(std::move(dist)) {}

  size_t size_;
  std::vector<double> dist_;
  std::optional<std::vector<PlanarPoint>> centers_;
  std::optional<GridSpec> grid_;
};

// Cell midpoints under the local equirectangular projection, Euclidean
// distance between midpoints.
absl::StatusOr<MetricSpace> BuildGrid(const GridSpec& spec);

// Planar midpoint of a grid cell.
PlanarPoint CellCenter(const GridSpec& spec, PointId id);

// Containing cell of (lat, lon), or nullopt when the point lies outside the
// rectangle. Cells are half-open: closed on the west and north edges.
std::optional<PointId> Locate(const GridSpec& spec, double lat, double lon);
std::optional<PointId> LocatePlanar(const GridSpec& spec, PlanarPoint p);

// Largest violation max(d(a,c) - d(a,b) - d(b,c), 0). Exhaustive over all
// triples when size() <= exhaustive_limit, otherwise over `samples` random
// triples drawn from a stream seeded with `seed`.
double TriangleInequalityViolation(const MetricSpace& space,
                                   size_t exhaustive_limit = 50,
                                   size_t samples = 200000,
                                   unsigned long long seed = 0);

}  // namespace mldp

#endif  // MLDP_METRIC_SPACE_H_
