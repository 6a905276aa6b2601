#pragma once

#include <vector>

#include "xtreval/field.hpp"
#include "xtreval/grid.hpp"

namespace xtreval {

/// Sparse first-order conservative remapping weights between two regular
/// grids. Weights are stored as fractions of the target cell's spherical
/// area, so a fully covered target's weights sum to 1. Depends only on the
/// two grids; rows (targets) are stored CSR-style.
struct RemapPlan {
  RegularGrid source;
  RegularGrid target;
  std::vector<Index> offsets;       // n_targets + 1
  std::vector<Index> source_cells;  // flat source ids, grouped by target
  std::vector<double> weights;      // target-area fractions, > 0
  ArrayXd coverage;                 // per-target in-domain covered fraction

  Index n_targets() const { return static_cast<Index>(offsets.size()) - 1; }
};

/// Overlap weights between every (source, target) cell pair with positive
/// spherical intersection area: dlon_overlap_radians * (sin lat_top -
/// sin lat_bottom) of the intersection, normalized by the target area.
/// Longitude overlap respects the periodic wrap. Throws DataError when the
/// domains are disjoint.
RemapPlan build_plan(const RegularGrid& source, const RegularGrid& target);

/// Remaps a daily field onto the plan's target grid. Each day's target value
/// is the weight-renormalized mean over non-missing sources, clamped to the
/// contributing sources' [min, max] so constants and bounds survive rounding.
/// Targets whose non-missing covered fraction falls below coverage_threshold
/// are missing. Appends the regrid tag to the provenance chain.
DailyField apply_plan(const RemapPlan& plan, const DailyField& field,
                      double coverage_threshold = 0.5, int workers = 0);

}  // namespace xtreval
