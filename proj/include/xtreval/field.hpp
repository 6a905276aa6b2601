#pragma once

#include <string>
#include <vector>

#include "xtreval/date.hpp"
#include "xtreval/grid.hpp"
#include "xtreval/types.hpp"

namespace xtreval {

/// Ordered pipeline-stage tags carried with every store; the fit stage
/// rejects maxima whose chain shows regridding after extraction.
using Provenance = std::vector<std::string>;

namespace provenance {
inline constexpr const char* kIngest = "ingest";
inline constexpr const char* kSynth = "synth";
inline constexpr const char* kRemap = "remap";
inline constexpr const char* kRx5day = "rx5day";
inline constexpr const char* kFit = "fit";
}  // namespace provenance

/// Daily precipitation (mm/day) on a grid over a contiguous calendar-day
/// axis. values(day, cell); NaN marks missing. Immutable by convention once
/// built.
struct DailyField {
  RegularGrid grid;
  CivilDate start;
  ArrayXXd values;  // n_days x n_cells
  Provenance provenance;

  Index n_days() const { return values.rows(); }
  CivilDate date_at(Index day) const { return civil_from_days(days_from_civil(start) + day); }

  /// Throws DataError when shapes disagree or non-missing values are
  /// negative.
  void validate() const;
};

/// Per-cell, per-season-year block maxima (mm), optionally with ensemble
/// replicates. Row index is year_idx * n_replicates + replicate, so the
/// storage order matches the [year][replicate][cell] payload convention.
struct SeasonMaxSeries {
  RegularGrid grid;
  std::vector<int> season_years;  // strictly increasing
  Index n_replicates = 1;
  ArrayXXd values;  // (n_years * n_replicates) x n_cells
  std::string season = "DJF";
  Provenance provenance;

  Index n_years() const { return static_cast<Index>(season_years.size()); }
  double value(Index year_idx, Index replicate, Index cell) const {
    return values(year_idx * n_replicates + replicate, cell);
  }
  double& value(Index year_idx, Index replicate, Index cell) {
    return values(year_idx * n_replicates + replicate, cell);
  }

  void validate() const;
};

/// Per-cell mean elevation in meters.
struct ElevationField {
  RegularGrid grid;
  ArrayXd mean_elevation;  // n_cells; NaN allowed on non-land cells only

  void validate() const;
};

/// One weather station with its completeness fraction over the study period.
struct StationRecord {
  std::string id;
  double lat = 0.0;
  double lon = 0.0;
  double elevation_m = 0.0;
  double completeness = 0.0;  // fraction of non-missing daily records, [0,1]

  void validate() const;
};

/// Smoothed annual covariate (GMT anomaly, kelvin) with its baseline mean.
struct CovariateSeries {
  std::vector<int> years;  // contiguous
  ArrayXd x;               // smoothed anomaly per year
  double xbar = 0.0;       // mean of x over the baseline span
  int baseline_start = 0;
  int baseline_end = 0;  // inclusive

  Index n_years() const { return static_cast<Index>(years.size()); }

  /// Value for a given calendar year; throws DataError when the year is not
  /// covered.
  double at_year(int year) const;

  void validate() const;
};

}  // namespace xtreval
