#pragma once

#include <cstdint>
#include <functional>

#include "xtreval/field.hpp"
#include "xtreval/fit.hpp"

namespace xtreval {

using YearIndexTable = Eigen::Array<Index, Eigen::Dynamic, Eigen::Dynamic>;

/// B with-replacement draws from {0..n_years-1}, one row per replicate, each
/// of length n_years (the block is one season-year). Row b depends only on
/// (seed, b), so replicates can be generated in any order or in parallel
/// without changing the table.
YearIndexTable resample_years(Index n_years, int B, std::uint64_t seed);

struct BootstrapOptions {
  int B = 250;
  std::uint64_t seed = 0;
  int workers = 0;
  double max_failure_fraction = 0.10;  // above this the result carries a warning
};

/// Per-replicate values of a statistic; failed replicates hold NaN rows and
/// are counted, never silently dropped.
struct BootstrapEnsemble {
  ArrayXXd replicates;  // B x n_stats
  int n_failed = 0;
  bool warning = false;  // failure fraction exceeded max_failure_fraction
  std::uint64_t seed = 0;
};

/// Statistic of a year-resampled series. `values` keeps the series' row
/// layout (year_idx * n_replicates + replicate); `x_obs` is the matching
/// per-row covariate, resampled in step with the rows. Must be pure.
/// Throwing DataError or returning a non-finite entry fails the replicate.
using SeriesStatistic = std::function<ArrayXd(const ArrayXXd& values, const ArrayXd& x_obs)>;

BootstrapEnsemble bootstrap_statistic(const SeasonMaxSeries& series,
                                      const CovariateSeries& covariate,
                                      const SeriesStatistic& statistic,
                                      const BootstrapOptions& opts = {});

/// Per-replicate refits of every cell. Each cell with a converged point fit
/// is refit on the year-resampled maxima (warm-started from the point
/// estimate); row b holds replicate b's return values and parameters, NaN
/// where the replicate refit failed. Cells without a converged point fit
/// stay all-NaN and do not count toward failures or the warning.
struct BootstrapFitField {
  ArrayXXd rv;  // B x n_cells, r-year return value at X = xbar
  ArrayXXd mu0;
  ArrayXXd mu1;
  ArrayXXd sigma;
  ArrayXXd xi;
  Eigen::ArrayXi cell_failures;  // failed replicates per cell
  bool warning = false;
  std::uint64_t seed = 0;
};

BootstrapFitField bootstrap_fit_field(const SeasonMaxSeries& series,
                                      const CovariateSeries& covariate, const FieldFit& point,
                                      const FitOptions& fit_opts = {},
                                      const BootstrapOptions& opts = {});

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

/// Empirical p-quantile with linear interpolation between order statistics
/// (inclusive endpoints): h = (n-1)p, interpolate values h_floor and
/// h_floor+1 of the sorted sample.
double quantile(const ArrayXd& values, double p);

/// Basic bootstrap interval [2*point - q_{1-alpha/2}, 2*point - q_{alpha/2}]
/// over the finite replicates. Requires at least 30 finite replicates.
Interval basic_ci(double point, const ArrayXd& replicates, double level = 0.95);

}  // namespace xtreval
