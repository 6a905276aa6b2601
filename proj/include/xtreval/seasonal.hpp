#pragma once

#include <string>
#include <vector>

#include "xtreval/field.hpp"

namespace xtreval {

/// A block of consecutive months; start_month > end_month means the season
/// wraps the year boundary (DJF) and is labeled by the year of its end
/// month, matching the convention that Dec 1950 - Feb 1951 is season 1951.
struct Season {
  std::string name = "DJF";
  int start_month = 12;
  int end_month = 2;

  bool wraps() const { return start_month > end_month; }
  CivilDate start_date(int label_year) const {
    return CivilDate{wraps() ? label_year - 1 : label_year, start_month, 1};
  }
  CivilDate end_date(int label_year) const {
    return CivilDate{label_year, end_month, days_in_month(label_year, end_month)};
  }

  /// Supports the four standard three-month seasons.
  static Season from_name(const std::string& name);
};

/// Largest running `window_days` precipitation total per cell and season,
/// over windows lying fully inside the season. Windows touching a missing
/// day are skipped; a season with no valid window is missing. Only seasons
/// completely covered by the daily axis are emitted.
/// Throws DataError when no complete season is covered.
SeasonMaxSeries running_total_max(const DailyField& daily, const Season& season,
                                  int window_days = 5);

/// DJF Rx5Day block maxima.
inline SeasonMaxSeries rx5day_djf(const DailyField& daily) {
  return running_total_max(daily, Season::from_name("DJF"), 5);
}

/// Stacks per-member season maxima into one series with a replicate axis.
/// Grids, season labels and year axes must agree exactly; values are copied
/// unchanged. Throws DataError on mismatched axes.
SeasonMaxSeries pool_ensemble(const std::vector<SeasonMaxSeries>& members);

/// Centered 5-year running mean of an annual series. At the edges the
/// window shrinks symmetrically, except that the first and last point use
/// the nearest 3-year window so no mean is taken over fewer than 3 years.
/// xbar is the mean of the smoothed series over [baseline_start,
/// baseline_end] (inclusive); both must be covered by the year axis.
CovariateSeries smooth_gmt(const std::vector<int>& years, const ArrayXd& anomalies,
                           int baseline_start, int baseline_end);

}  // namespace xtreval
