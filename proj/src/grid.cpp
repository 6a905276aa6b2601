#include "xtreval/grid.hpp"

#include <algorithm>
#include <cmath>

#include "xtreval/errors.hpp"

namespace xtreval {

double normalize_lon(double lon) {
  double l = std::fmod(lon + 180.0, 360.0);
  if (l < 0.0) l += 360.0;
  return l - 180.0;
}

namespace {

void check_ascending(const ArrayXd& edges, const char* axis) {
  if (edges.size() < 2) {
    throw DataError(std::string("grid: ") + axis + " needs at least 2 edges");
  }
  for (Index i = 0; i + 1 < edges.size(); ++i) {
    if (!(edges[i] < edges[i + 1])) {
      throw DataError(std::string("grid: ") + axis + " edges must be strictly ascending");
    }
    if (!std::isfinite(edges[i])) {
      throw DataError(std::string("grid: ") + axis + " edge not finite");
    }
  }
  if (!std::isfinite(edges[edges.size() - 1])) {
    throw DataError(std::string("grid: ") + axis + " edge not finite");
  }
}

}  // namespace

RegularGrid::RegularGrid(ArrayXd lat_edges, ArrayXd lon_edges, ArrayXd land_fraction)
    : lat_edges_(std::move(lat_edges)),
      lon_edges_(std::move(lon_edges)),
      land_fraction_(std::move(land_fraction)) {
  check_ascending(lat_edges_, "lat");
  check_ascending(lon_edges_, "lon");
  if (lat_edges_[0] < -90.0 - 1e-12 || lat_edges_[lat_edges_.size() - 1] > 90.0 + 1e-12) {
    throw DataError("grid: latitude edges outside [-90, 90]");
  }

  const Index nlon = lon_edges_.size() - 1;
  const double span = lon_edges_[nlon] - lon_edges_[0];
  if (span > 360.0 + 1e-9) {
    throw DataError("grid: longitude span exceeds 360 degrees");
  }

  // Normalize longitudes to [-180, 180). A full-circle grid is rotated so
  // that edges ascend again; a partial grid must not cross the antimeridian
  // after wrapping.
  Index rotation = 0;
  if (lon_edges_[0] < -180.0 - 1e-12 || lon_edges_[nlon] >= 180.0 + 1e-12) {
    const bool periodic = std::abs(span - 360.0) < 1e-9;
    ArrayXd wrapped(nlon);  // lower edges only
    for (Index i = 0; i < nlon; ++i) wrapped[i] = normalize_lon(lon_edges_[i]);

    Index start = 0;
    for (Index i = 1; i < nlon; ++i) {
      if (wrapped[i] < wrapped[i - 1]) {
        if (start != 0 || !periodic) {
          throw DataError(
              "grid: longitude range crosses the antimeridian after normalization; unsupported");
        }
        start = i;
      }
    }
    rotation = start;
    ArrayXd rotated(nlon + 1);
    for (Index i = 0; i < nlon; ++i) rotated[i] = wrapped[(start + i) % nlon];
    rotated[nlon] = periodic ? rotated[0] + 360.0 : normalize_lon(lon_edges_[nlon]);
    // An upper edge exactly at the antimeridian maps to +180, not -180.
    if (rotated[nlon] <= rotated[nlon - 1]) rotated[nlon] += 360.0;
    lon_edges_ = std::move(rotated);
    check_ascending(lon_edges_, "lon");
    if (lon_edges_[nlon] > 180.0 + 1e-9) {
      throw DataError("grid: longitude edges could not be normalized to [-180, 180]");
    }
  }

  const Index ncells = n_lat() * n_lon();
  if (land_fraction_.size() != ncells) {
    throw DataError("grid: land_fraction must have one value per cell");
  }
  if (rotation != 0) {
    ArrayXd rotated(ncells);
    for (Index r = 0; r < n_lat(); ++r) {
      for (Index c = 0; c < nlon; ++c) {
        rotated[r * nlon + c] = land_fraction_[r * nlon + (rotation + c) % nlon];
      }
    }
    land_fraction_ = std::move(rotated);
  }
  for (Index i = 0; i < ncells; ++i) {
    const double f = land_fraction_[i];
    if (!(f >= 0.0 && f <= 1.0)) {
      throw DataError("grid: land_fraction values must lie in [0, 1]");
    }
  }
}

RegularGrid RegularGrid::uniform_land(ArrayXd lat_edges, ArrayXd lon_edges, double land_fraction) {
  const Index ncells = (lat_edges.size() - 1) * (lon_edges.size() - 1);
  return RegularGrid(std::move(lat_edges), std::move(lon_edges),
                     ArrayXd::Constant(ncells, land_fraction));
}

ArrayXb RegularGrid::land_mask(double threshold) const {
  return land_fraction_ >= threshold;
}

ArrayXd RegularGrid::area_weights() const {
  const Index nlat = n_lat();
  const Index nlon = n_lon();
  ArrayXd band(nlat);
  for (Index r = 0; r < nlat; ++r) {
    band[r] = std::sin(deg2rad(lat_edges_[r + 1])) - std::sin(deg2rad(lat_edges_[r]));
    if (!(band[r] > 0.0)) {
      throw DataError("grid: degenerate latitude band");
    }
  }
  ArrayXd dlon(nlon);
  for (Index c = 0; c < nlon; ++c) {
    dlon[c] = deg2rad(lon_edges_[c + 1] - lon_edges_[c]);
    if (!(dlon[c] > 0.0)) {
      throw DataError("grid: degenerate longitude band");
    }
  }
  ArrayXd w(n_cells());
  for (Index r = 0; r < nlat; ++r) {
    for (Index c = 0; c < nlon; ++c) w[r * nlon + c] = band[r] * dlon[c];
  }
  return w;
}

namespace {

// Index of the half-open interval [e_i, e_{i+1}) containing v, or -1.
Index interval_index(const ArrayXd& edges, double v) {
  const Index n = edges.size();
  if (v < edges[0] || v >= edges[n - 1]) return -1;
  const double* begin = edges.data();
  const double* it = std::upper_bound(begin, begin + n, v);
  return static_cast<Index>(it - begin) - 1;
}

}  // namespace

std::optional<CellId> RegularGrid::locate_cell(double lat, double lon) const {
  const Index row = interval_index(lat_edges_, lat);
  if (row < 0) return std::nullopt;
  const Index col = interval_index(lon_edges_, normalize_lon(lon));
  if (col < 0) return std::nullopt;
  return CellId{row, col};
}

bool RegularGrid::same_shape(const RegularGrid& other) const {
  return n_lat() == other.n_lat() && n_lon() == other.n_lon();
}

bool RegularGrid::same_geometry(const RegularGrid& other, double tol) const {
  if (!same_shape(other)) return false;
  return (lat_edges_ - other.lat_edges_).abs().maxCoeff() <= tol &&
         (lon_edges_ - other.lon_edges_).abs().maxCoeff() <= tol;
}

ArrayXd area_weights(const RegularGrid& grid) { return grid.area_weights(); }

std::optional<CellId> locate_cell(const RegularGrid& grid, double lat, double lon) {
  return grid.locate_cell(lat, lon);
}

}  // namespace xtreval
