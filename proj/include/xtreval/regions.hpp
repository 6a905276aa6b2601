#pragma once

#include <array>
#include <string>
#include <vector>

#include "xtreval/grid.hpp"

namespace xtreval {

/// A named evaluation region given as an explicit cell list, a bounding box,
/// or a closed polygon. Box and polygon membership test cell centers;
/// polygon vertices are (lat, lon) pairs and must not cross the antimeridian.
struct RegionSpec {
  enum class Kind { Cells, Bbox, Polygon };

  std::string id;
  Kind kind = Kind::Bbox;
  std::vector<CellId> cells;
  double lat_min = -90.0;
  double lat_max = 90.0;
  double lon_min = -180.0;  // lon_min > lon_max wraps across the antimeridian
  double lon_max = 180.0;
  std::vector<std::array<double, 2>> polygon;  // (lat, lon) vertices
};

/// Per-cell membership of the region on the given grid. Throws DataError for
/// out-of-range cell ids or a polygon with fewer than 3 vertices.
ArrayXb region_mask(const RegionSpec& region, const RegularGrid& grid);

}  // namespace xtreval
