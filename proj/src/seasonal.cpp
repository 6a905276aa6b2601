#include "xtreval/seasonal.hpp"

#include <cmath>
#include <limits>

#include "xtreval/errors.hpp"

namespace xtreval {

Season Season::from_name(const std::string& name) {
  if (name == "DJF") return Season{"DJF", 12, 2};
  if (name == "MAM") return Season{"MAM", 3, 5};
  if (name == "JJA") return Season{"JJA", 6, 8};
  if (name == "SON") return Season{"SON", 9, 11};
  throw DataError("unknown season: " + name);
}

SeasonMaxSeries running_total_max(const DailyField& daily, const Season& season,
                                  int window_days) {
  daily.validate();
  if (window_days < 1) throw DataError("window length must be >= 1");

  const std::int64_t first_day = days_from_civil(daily.start);
  const std::int64_t last_day = first_day + daily.n_days() - 1;

  // Candidate season labels: every year whose season could intersect the axis.
  const int first_year = civil_from_days(first_day).year;
  const int last_year = civil_from_days(last_day).year + 1;

  std::vector<int> years;
  std::vector<std::pair<Index, Index>> spans;  // [begin, end] day offsets
  for (int t = first_year; t <= last_year; ++t) {
    const std::int64_t begin = days_from_civil(season.start_date(t));
    const std::int64_t end = days_from_civil(season.end_date(t));
    if (begin < first_day || end > last_day) continue;  // incomplete season
    years.push_back(t);
    spans.emplace_back(static_cast<Index>(begin - first_day),
                       static_cast<Index>(end - first_day));
  }
  if (years.empty()) {
    throw DataError("daily axis does not cover a complete " + season.name + " season");
  }

  const Index n_cells = daily.grid.n_cells();
  const Index n_seasons = static_cast<Index>(years.size());
  ArrayXXd out = ArrayXXd::Constant(n_seasons, n_cells, kMissing);

  for (Index cell = 0; cell < n_cells; ++cell) {
    const auto col = daily.values.col(cell);
    for (Index s = 0; s < n_seasons; ++s) {
      const auto [begin, end] = spans[s];
      double best = -std::numeric_limits<double>::infinity();
      for (Index w = begin; w + window_days - 1 <= end; ++w) {
        double sum = 0.0;
        for (Index k = 0; k < window_days; ++k) sum += col[w + k];
        if (std::isnan(sum)) continue;  // window touches a missing day
        if (sum > best) best = sum;
      }
      if (std::isfinite(best)) out(s, cell) = best;
    }
  }

  SeasonMaxSeries series{daily.grid, {}, 1, {}, "DJF", {}};
  series.season_years = std::move(years);
  series.n_replicates = 1;
  series.values = std::move(out);
  series.season = season.name;
  series.provenance = daily.provenance;
  series.provenance.push_back(provenance::kRx5day);
  return series;
}

SeasonMaxSeries pool_ensemble(const std::vector<SeasonMaxSeries>& members) {
  if (members.empty()) throw DataError("pool_ensemble: no members");
  const SeasonMaxSeries& head = members.front();
  Index total_reps = 0;
  for (const auto& m : members) {
    if (!m.grid.same_geometry(head.grid)) {
      throw DataError("pool_ensemble: member grids differ");
    }
    if (m.season_years != head.season_years || m.season != head.season) {
      throw DataError("pool_ensemble: member year axes differ");
    }
    total_reps += m.n_replicates;
  }

  SeasonMaxSeries pooled{head.grid, {}, 1, {}, "DJF", {}};
  pooled.season_years = head.season_years;
  pooled.n_replicates = total_reps;
  pooled.season = head.season;
  pooled.provenance = head.provenance;
  pooled.values.resize(head.n_years() * total_reps, head.grid.n_cells());
  for (Index y = 0; y < head.n_years(); ++y) {
    Index rep = 0;
    for (const auto& m : members) {
      for (Index r = 0; r < m.n_replicates; ++r, ++rep) {
        pooled.values.row(y * total_reps + rep) = m.values.row(y * m.n_replicates + r);
      }
    }
  }
  return pooled;
}

CovariateSeries smooth_gmt(const std::vector<int>& years, const ArrayXd& anomalies,
                           int baseline_start, int baseline_end) {
  const Index n = static_cast<Index>(years.size());
  if (n != anomalies.size()) throw DataError("smooth_gmt: years and values differ in length");
  if (n < 5) throw DataError("smooth_gmt: need at least 5 years");
  for (Index i = 1; i < n; ++i) {
    if (years[i] != years[i - 1] + 1) throw DataError("smooth_gmt: gap in year axis");
  }
  if (!anomalies.isFinite().all()) throw DataError("smooth_gmt: non-finite anomaly");

  ArrayXd smoothed(n);
  for (Index i = 0; i < n; ++i) {
    const Index h = std::min<Index>(2, std::min(i, n - 1 - i));
    Index lo = i - h;
    Index hi = i + h;
    while (hi - lo + 1 < 3) {  // endpoints fall back to the nearest 3 years
      if (lo > 0) --lo;
      if (hi - lo + 1 < 3 && hi < n - 1) ++hi;
    }
    smoothed[i] = anomalies.segment(lo, hi - lo + 1).mean();
  }

  if (baseline_start > baseline_end || baseline_start < years.front() ||
      baseline_end > years.back()) {
    throw DataError("smooth_gmt: baseline span not covered by the year axis");
  }

  CovariateSeries cov;
  cov.years = years;
  cov.x = std::move(smoothed);
  cov.baseline_start = baseline_start;
  cov.baseline_end = baseline_end;
  cov.xbar =
      cov.x.segment(baseline_start - years.front(), baseline_end - baseline_start + 1).mean();
  cov.validate();
  return cov;
}

}  // namespace xtreval
