#include "xtreval/sampling.hpp"

#include <algorithm>
#include <cmath>

#include "xtreval/rng.hpp"

namespace xtreval {

void CellMask::validate() const {
  if (included.size() != grid.n_cells() || station_count.size() != grid.n_cells()) {
    throw DataError("CellMask: per-cell arrays do not match the grid");
  }
  if ((station_count < 0).any()) throw DataError("CellMask: negative station count");
}

std::vector<StationRecord> high_quality_filter(const std::vector<StationRecord>& stations,
                                               double threshold) {
  std::vector<StationRecord> kept;
  kept.reserve(stations.size());
  for (const StationRecord& s : stations) {
    if (s.completeness >= threshold) kept.push_back(s);
  }
  return kept;
}

CellMask build_a1_mask(const RegularGrid& grid, const std::vector<StationRecord>& stations,
                       double land_threshold) {
  CellMask mask{grid, ArrayXb::Constant(grid.n_cells(), false), approach::kA1,
                Eigen::ArrayXi::Zero(grid.n_cells())};
  for (const StationRecord& s : stations) {
    const auto cell = grid.locate_cell(s.lat, s.lon);
    if (!cell) continue;
    ++mask.station_count[grid.cell_index(*cell)];
  }
  const ArrayXb land = grid.land_mask(land_threshold);
  mask.included = land && (mask.station_count > 0);
  return mask;
}

CellMask all_land_mask(const RegularGrid& grid, double land_threshold) {
  return CellMask{grid, grid.land_mask(land_threshold), approach::kA2,
                  Eigen::ArrayXi::Zero(grid.n_cells())};
}

CellMask subsample_mask(const CellMask& a1, double target_proportion, std::uint64_t seed) {
  a1.validate();
  const Index n_land = a1.grid.land_mask().count();
  const Index target = n_land > 0 ? static_cast<Index>(std::llround(target_proportion * n_land))
                                  : Index{0};
  if (target > a1.n_included()) {
    throw ConfigError("subsample_mask: target proportion exceeds the sampled proportion");
  }

  std::vector<Index> cells;
  cells.reserve(static_cast<std::size_t>(a1.n_included()));
  for (Index c = 0; c < a1.included.size(); ++c) {
    if (a1.included[c]) cells.push_back(c);
  }
  // Fisher-Yates; the first `target` entries are the sample.
  CounterRng rng(seed, {0x73756273616dULL});
  for (std::size_t i = cells.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng.uniform_below(i));
    std::swap(cells[i - 1], cells[j]);
  }

  CellMask mask{a1.grid, ArrayXb::Constant(a1.grid.n_cells(), false), approach::kA3Subsample,
                a1.station_count};
  for (Index i = 0; i < target; ++i) mask.included[cells[static_cast<std::size_t>(i)]] = true;
  return mask;
}

CellMask elevation_threshold_mask(const CellMask& land, const CellMask& a1,
                                  const ElevationField& elevation) {
  land.validate();
  a1.validate();
  elevation.validate();
  if (!land.grid.same_geometry(a1.grid) || !land.grid.same_geometry(elevation.grid)) {
    throw DataError("elevation_threshold_mask: inputs are on different grids");
  }
  if (a1.n_included() == 0) {
    throw DataError("elevation_threshold_mask: empty station mask, no cutoff defined");
  }

  double cutoff = -std::numeric_limits<double>::infinity();
  for (Index c = 0; c < a1.included.size(); ++c) {
    if (a1.included[c]) cutoff = std::max(cutoff, elevation.mean_elevation[c]);
  }

  CellMask mask{land.grid, ArrayXb::Constant(land.grid.n_cells(), false), approach::kA3Elevation,
                a1.station_count};
  for (Index c = 0; c < land.included.size(); ++c) {
    mask.included[c] = land.included[c] && elevation.mean_elevation[c] <= cutoff;
  }
  return mask;
}

MaskSummary mask_summary(const CellMask& mask, double land_threshold) {
  MaskSummary s;
  s.n_land = mask.grid.land_mask(land_threshold).count();
  s.n_sampled = mask.n_included();
  s.proportion = s.n_land > 0 ? static_cast<double>(s.n_sampled) / static_cast<double>(s.n_land)
                              : 0.0;
  return s;
}

}  // namespace xtreval
