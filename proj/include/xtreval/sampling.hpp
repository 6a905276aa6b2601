#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "xtreval/field.hpp"
#include "xtreval/grid.hpp"

namespace xtreval {

namespace approach {
inline constexpr const char* kA1 = "A1-station";
inline constexpr const char* kA2 = "A2-all-land";
inline constexpr const char* kA3Subsample = "A3-subsample";
inline constexpr const char* kA3Elevation = "A3-elevation";
}  // namespace approach

/// Per-cell inclusion flags for one evaluation approach. Included cells are
/// always a subset of the land cells.
struct CellMask {
  RegularGrid grid;
  ArrayXb included;               // n_cells
  std::string provenance;         // one of the approach:: names
  Eigen::ArrayXi station_count;   // n_cells; zero where uncounted

  Index n_included() const { return included.count(); }
  void validate() const;
};

/// Counts of land vs station-sampled cells: N_c, N_{c+s} and their ratio.
struct MaskSummary {
  Index n_land = 0;
  Index n_sampled = 0;
  double proportion = 0.0;  // n_sampled / n_land
};

/// Stations with completeness >= threshold.
std::vector<StationRecord> high_quality_filter(const std::vector<StationRecord>& stations,
                                               double threshold = 0.90);

/// Land cells holding at least one station (stations located under the
/// half-open cell rule; off-grid stations are ignored). Stations should
/// already be quality-filtered. An empty station set yields an empty mask.
CellMask build_a1_mask(const RegularGrid& grid, const std::vector<StationRecord>& stations,
                       double land_threshold = RegularGrid::kDefaultLandThreshold);

/// Every land cell.
CellMask all_land_mask(const RegularGrid& grid,
                       double land_threshold = RegularGrid::kDefaultLandThreshold);

/// Uniform without-replacement subset of the A1 cells sized
/// round(target_proportion * n_land). Throws ConfigError when the target
/// exceeds the A1 proportion. Deterministic under seed.
CellMask subsample_mask(const CellMask& a1, double target_proportion, std::uint64_t seed);

/// Land cells whose mean elevation does not exceed the highest elevation
/// among the A1 cells. Throws DataError on an empty A1 mask.
CellMask elevation_threshold_mask(const CellMask& land, const CellMask& a1,
                                  const ElevationField& elevation);

MaskSummary mask_summary(const CellMask& mask,
                         double land_threshold = RegularGrid::kDefaultLandThreshold);

}  // namespace xtreval
