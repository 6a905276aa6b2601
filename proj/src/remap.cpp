#include "xtreval/remap.hpp"

#include <algorithm>
#include <cmath>

#include "xtreval/parallel.hpp"

namespace xtreval {

namespace {

struct AxisOverlap {
  std::vector<Index> offsets;  // n_target_bands + 1
  std::vector<Index> sources;
  std::vector<double> lengths;  // spherical extent of each intersection
};

/// Latitude-band overlaps weighted by sin(top) - sin(bottom).
AxisOverlap lat_overlaps(const ArrayXd& src_edges, const ArrayXd& tgt_edges) {
  AxisOverlap out;
  out.offsets.push_back(0);
  for (Index t = 0; t + 1 < tgt_edges.size(); ++t) {
    for (Index s = 0; s + 1 < src_edges.size(); ++s) {
      const double lo = std::max(tgt_edges[t], src_edges[s]);
      const double hi = std::min(tgt_edges[t + 1], src_edges[s + 1]);
      if (hi <= lo) continue;
      out.sources.push_back(s);
      out.lengths.push_back(std::sin(deg2rad(hi)) - std::sin(deg2rad(lo)));
    }
    out.offsets.push_back(static_cast<Index>(out.sources.size()));
  }
  return out;
}

/// Longitude overlaps in radians; source intervals are tested at relative
/// shifts of -360, 0, +360 degrees so the periodic seam cannot hide overlap.
AxisOverlap lon_overlaps(const ArrayXd& src_edges, const ArrayXd& tgt_edges) {
  AxisOverlap out;
  out.offsets.push_back(0);
  for (Index t = 0; t + 1 < tgt_edges.size(); ++t) {
    for (Index s = 0; s + 1 < src_edges.size(); ++s) {
      double total = 0.0;
      for (const double shift : {-360.0, 0.0, 360.0}) {
        const double lo = std::max(tgt_edges[t], src_edges[s] + shift);
        const double hi = std::min(tgt_edges[t + 1], src_edges[s + 1] + shift);
        if (hi > lo) total += hi - lo;
      }
      if (total <= 0.0) continue;
      out.sources.push_back(s);
      out.lengths.push_back(deg2rad(total));
    }
    out.offsets.push_back(static_cast<Index>(out.sources.size()));
  }
  return out;
}

}  // namespace

RemapPlan build_plan(const RegularGrid& source, const RegularGrid& target) {
  const AxisOverlap lat = lat_overlaps(source.lat_edges(), target.lat_edges());
  const AxisOverlap lon = lon_overlaps(source.lon_edges(), target.lon_edges());
  const ArrayXd target_area = target.area_weights();

  RemapPlan plan{source, target, {}, {}, {}, ArrayXd::Zero(target.n_cells())};
  plan.offsets.reserve(static_cast<std::size_t>(target.n_cells()) + 1);
  plan.offsets.push_back(0);

  for (Index trow = 0; trow < target.n_lat(); ++trow) {
    for (Index tcol = 0; tcol < target.n_lon(); ++tcol) {
      const Index tcell = target.cell_index(trow, tcol);
      double covered = 0.0;
      for (Index a = lat.offsets[trow]; a < lat.offsets[trow + 1]; ++a) {
        for (Index b = lon.offsets[tcol]; b < lon.offsets[tcol + 1]; ++b) {
          const double w = lat.lengths[a] * lon.lengths[b] / target_area[tcell];
          plan.source_cells.push_back(source.cell_index(lat.sources[a], lon.sources[b]));
          plan.weights.push_back(w);
          covered += w;
        }
      }
      plan.coverage[tcell] = covered;
      plan.offsets.push_back(static_cast<Index>(plan.source_cells.size()));
    }
  }

  if (plan.source_cells.empty()) {
    throw DataError("build_plan: the source and target domains do not overlap");
  }
  return plan;
}

DailyField apply_plan(const RemapPlan& plan, const DailyField& field, double coverage_threshold,
                      int workers) {
  if (!field.grid.same_geometry(plan.source)) {
    throw DataError("apply_plan: field is not on the plan's source grid");
  }
  field.validate();

  DailyField out{plan.target, field.start,
                 ArrayXXd::Constant(field.n_days(), plan.target.n_cells(), kMissing),
                 field.provenance};
  out.provenance.push_back(provenance::kRemap);

  const Index n_days = field.n_days();
  parallel_for(plan.n_targets(), workers, [&](Index tcell) {
    const Index begin = plan.offsets[static_cast<std::size_t>(tcell)];
    const Index end = plan.offsets[static_cast<std::size_t>(tcell) + 1];
    if (begin == end) return;
    for (Index day = 0; day < n_days; ++day) {
      double num = 0.0;
      double denom = 0.0;
      double vmin = std::numeric_limits<double>::infinity();
      double vmax = -std::numeric_limits<double>::infinity();
      for (Index k = begin; k < end; ++k) {
        const double v = field.values(day, plan.source_cells[static_cast<std::size_t>(k)]);
        if (is_missing(v)) continue;
        const double w = plan.weights[static_cast<std::size_t>(k)];
        num += w * v;
        denom += w;
        vmin = std::min(vmin, v);
        vmax = std::max(vmax, v);
      }
      if (denom >= coverage_threshold) {
        out.values(day, tcell) = std::clamp(num / denom, vmin, vmax);
      }
    }
  });
  return out;
}

}  // namespace xtreval
