#include "xtreval/regions.hpp"

#include "xtreval/errors.hpp"

namespace xtreval {

namespace {

bool lon_in_range(double lon, double lo, double hi) {
  if (lo <= hi) return lon >= lo && lon <= hi;
  return lon >= lo || lon <= hi;  // wraps across the antimeridian
}

/// Even-odd crossing rule on the (lon, lat) plane.
bool point_in_polygon(double lat, double lon, const std::vector<std::array<double, 2>>& poly) {
  bool inside = false;
  const std::size_t n = poly.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const double yi = poly[i][0], xi = poly[i][1];
    const double yj = poly[j][0], xj = poly[j][1];
    if ((yi > lat) != (yj > lat) && lon < (xj - xi) * (lat - yi) / (yj - yi) + xi) {
      inside = !inside;
    }
  }
  return inside;
}

}  // namespace

ArrayXb region_mask(const RegionSpec& region, const RegularGrid& grid) {
  ArrayXb mask = ArrayXb::Constant(grid.n_cells(), false);

  switch (region.kind) {
    case RegionSpec::Kind::Cells:
      for (const CellId& id : region.cells) {
        if (id.row < 0 || id.row >= grid.n_lat() || id.col < 0 || id.col >= grid.n_lon()) {
          throw DataError("region '" + region.id + "': cell (" + std::to_string(id.row) + ", " +
                          std::to_string(id.col) + ") is outside the grid");
        }
        mask[grid.cell_index(id)] = true;
      }
      break;

    case RegionSpec::Kind::Bbox:
      for (Index row = 0; row < grid.n_lat(); ++row) {
        const double lat = grid.cell_center_lat(row);
        if (lat < region.lat_min || lat > region.lat_max) continue;
        for (Index col = 0; col < grid.n_lon(); ++col) {
          const double lon = normalize_lon(grid.cell_center_lon(col));
          if (lon_in_range(lon, region.lon_min, region.lon_max)) {
            mask[grid.cell_index(row, col)] = true;
          }
        }
      }
      break;

    case RegionSpec::Kind::Polygon:
      if (region.polygon.size() < 3) {
        throw DataError("region '" + region.id + "': polygon needs at least 3 vertices");
      }
      for (Index row = 0; row < grid.n_lat(); ++row) {
        const double lat = grid.cell_center_lat(row);
        for (Index col = 0; col < grid.n_lon(); ++col) {
          const double lon = normalize_lon(grid.cell_center_lon(col));
          if (point_in_polygon(lat, lon, region.polygon)) {
            mask[grid.cell_index(row, col)] = true;
          }
        }
      }
      break;
  }
  return mask;
}

}  // namespace xtreval
