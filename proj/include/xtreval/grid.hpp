#pragma once

#include <optional>

#include "xtreval/types.hpp"

namespace xtreval {

struct CellId {
  Index row = 0;  // latitude index
  Index col = 0;  // longitude index

  friend bool operator==(const CellId&, const CellId&) = default;
};

/// Wraps a longitude into [-180, 180).
double normalize_lon(double lon);

/// A regular latitude-longitude grid with cell edges and a per-cell land
/// fraction. Immutable after construction; cheap to copy and safe to share
/// across workers.
///
/// Cells are addressed (row, col) with row indexing latitude bands and col
/// longitude bands; the flat cell id is row * n_lon + col (row-major, the
/// payload order of field files). Cell intervals are half-open
/// [edge_low, edge_high), so a point on a shared interior edge belongs to
/// the cell on the higher side.
class RegularGrid {
 public:
  /// Validates edges and land fraction and normalizes longitudes to
  /// [-180, 180). Longitude edges given in [0, 360] are wrapped; full-circle
  /// grids are rotated so edges ascend (land_fraction columns rotate along).
  /// Throws DataError on degenerate or out-of-range inputs.
  RegularGrid(ArrayXd lat_edges, ArrayXd lon_edges, ArrayXd land_fraction);

  /// Convenience: uniform land fraction.
  static RegularGrid uniform_land(ArrayXd lat_edges, ArrayXd lon_edges, double land_fraction = 1.0);

  Index n_lat() const { return lat_edges_.size() - 1; }
  Index n_lon() const { return lon_edges_.size() - 1; }
  Index n_cells() const { return n_lat() * n_lon(); }

  const ArrayXd& lat_edges() const { return lat_edges_; }
  const ArrayXd& lon_edges() const { return lon_edges_; }
  const ArrayXd& land_fraction() const { return land_fraction_; }

  Index cell_index(Index row, Index col) const { return row * n_lon() + col; }
  Index cell_index(const CellId& id) const { return cell_index(id.row, id.col); }
  CellId cell_id(Index flat) const { return CellId{flat / n_lon(), flat % n_lon()}; }

  double cell_center_lat(Index row) const {
    return 0.5 * (lat_edges_[row] + lat_edges_[row + 1]);
  }
  double cell_center_lon(Index col) const {
    return 0.5 * (lon_edges_[col] + lon_edges_[col + 1]);
  }

  /// "Land" means land_fraction >= threshold; the default implements the
  /// fully-over-land exclusion (threshold 1 with a 1e-9 slack).
  bool is_land(Index flat, double threshold = kDefaultLandThreshold) const {
    return land_fraction_[flat] >= threshold;
  }
  ArrayXb land_mask(double threshold = kDefaultLandThreshold) const;

  /// Spherical area weight per cell on the unit sphere:
  /// (sin(lat_top) - sin(lat_bottom)) * dlon_radians. Positive for every
  /// cell; equal within a latitude row.
  ArrayXd area_weights() const;

  /// Cell containing (lat, lon) under the half-open interval rule, or
  /// nullopt when the point is outside the grid. The longitude is
  /// re-normalized before lookup.
  std::optional<CellId> locate_cell(double lat, double lon) const;

  bool same_shape(const RegularGrid& other) const;

  /// True when edges agree to within `tol` degrees (land fraction ignored).
  bool same_geometry(const RegularGrid& other, double tol = 1e-9) const;

  static constexpr double kDefaultLandThreshold = 1.0 - 1e-9;

 private:
  ArrayXd lat_edges_;
  ArrayXd lon_edges_;
  ArrayXd land_fraction_;  // n_cells, row-major
};

/// Free-function forms of the grid queries (the grid methods forward here).
ArrayXd area_weights(const RegularGrid& grid);
std::optional<CellId> locate_cell(const RegularGrid& grid, double lat, double lon);

}  // namespace xtreval
