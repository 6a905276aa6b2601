#include "xtreval/bootstrap.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "xtreval/gev.hpp"
#include "xtreval/parallel.hpp"
#include "xtreval/rng.hpp"

namespace xtreval {

namespace {

constexpr std::uint64_t kYearTag = 0x79656172736ULL;
constexpr std::uint64_t kRefitTag = 0x726566697451ULL;

/// Source row for each destination row under a year resample.
std::vector<Index> row_map(const Eigen::Ref<const Eigen::Array<Index, Eigen::Dynamic, 1>>& years,
                           Index n_replicates) {
  std::vector<Index> map(static_cast<std::size_t>(years.size() * n_replicates));
  for (Index t = 0; t < years.size(); ++t) {
    for (Index m = 0; m < n_replicates; ++m) {
      map[static_cast<std::size_t>(t * n_replicates + m)] = years[t] * n_replicates + m;
    }
  }
  return map;
}

}  // namespace

YearIndexTable resample_years(Index n_years, int B, std::uint64_t seed) {
  if (n_years < 1) throw DataError("resample_years: need at least one year");
  if (B < 1) throw ConfigError("resample_years: replicate count must be positive");
  YearIndexTable table(B, n_years);
  for (int b = 0; b < B; ++b) {
    CounterRng rng(seed, {kYearTag, static_cast<std::uint64_t>(b)});
    for (Index t = 0; t < n_years; ++t) {
      table(b, t) = static_cast<Index>(rng.uniform_below(static_cast<std::uint64_t>(n_years)));
    }
  }
  return table;
}

BootstrapEnsemble bootstrap_statistic(const SeasonMaxSeries& series,
                                      const CovariateSeries& covariate,
                                      const SeriesStatistic& statistic,
                                      const BootstrapOptions& opts) {
  series.validate();
  covariate.validate();
  const ArrayXd x_obs = observation_covariate(series, covariate);
  const YearIndexTable table = resample_years(series.n_years(), opts.B, opts.seed);
  const Index n_rows = series.values.rows();

  std::vector<ArrayXd> rows(static_cast<std::size_t>(opts.B));
  std::vector<char> ok(static_cast<std::size_t>(opts.B), 0);
  parallel_for(opts.B, opts.workers, [&](Index b) {
    const std::vector<Index> map = row_map(table.row(b), series.n_replicates);
    ArrayXXd values(n_rows, series.values.cols());
    ArrayXd x(n_rows);
    for (Index i = 0; i < n_rows; ++i) {
      values.row(i) = series.values.row(map[static_cast<std::size_t>(i)]);
      x[i] = x_obs[map[static_cast<std::size_t>(i)]];
    }
    try {
      ArrayXd stat = statistic(values, x);
      if (stat.isFinite().all()) {
        rows[static_cast<std::size_t>(b)] = std::move(stat);
        ok[static_cast<std::size_t>(b)] = 1;
      }
    } catch (const DataError&) {
    }
  });

  Index n_stats = -1;
  for (int b = 0; b < opts.B; ++b) {
    if (!ok[static_cast<std::size_t>(b)]) continue;
    const Index size = rows[static_cast<std::size_t>(b)].size();
    if (n_stats < 0) n_stats = size;
    if (size != n_stats) throw DataError("bootstrap_statistic: statistic size varies");
  }
  if (n_stats < 0) throw DataError("bootstrap_statistic: every replicate failed");

  BootstrapEnsemble out;
  out.seed = opts.seed;
  out.replicates = ArrayXXd::Constant(opts.B, n_stats, kMissing);
  for (int b = 0; b < opts.B; ++b) {
    if (ok[static_cast<std::size_t>(b)]) {
      out.replicates.row(b) = rows[static_cast<std::size_t>(b)];
    } else {
      ++out.n_failed;
    }
  }
  out.warning = out.n_failed > opts.max_failure_fraction * opts.B;
  return out;
}

BootstrapFitField bootstrap_fit_field(const SeasonMaxSeries& series,
                                      const CovariateSeries& covariate, const FieldFit& point,
                                      const FitOptions& fit_opts, const BootstrapOptions& opts) {
  series.validate();
  covariate.validate();
  const Index n_cells = series.values.cols();
  if (static_cast<Index>(point.cells.size()) != n_cells) {
    throw DataError("bootstrap_fit_field: point fit does not match the series grid");
  }
  const ArrayXd x_obs = observation_covariate(series, covariate);
  const YearIndexTable table = resample_years(series.n_years(), opts.B, opts.seed);
  const Index n_rows = series.values.rows();

  BootstrapFitField out;
  out.seed = opts.seed;
  out.rv = ArrayXXd::Constant(opts.B, n_cells, kMissing);
  out.mu0 = out.rv;
  out.mu1 = out.rv;
  out.sigma = out.rv;
  out.xi = out.rv;
  out.cell_failures = Eigen::ArrayXi::Zero(n_cells);

  parallel_for(opts.B, opts.workers, [&](Index b) {
    const std::vector<Index> map = row_map(table.row(b), series.n_replicates);
    ArrayXd x(n_rows);
    for (Index i = 0; i < n_rows; ++i) x[i] = x_obs[map[static_cast<std::size_t>(i)]];

    ArrayXd y(n_rows);
    for (Index cell = 0; cell < n_cells; ++cell) {
      const GevFit& base = point.cells[static_cast<std::size_t>(cell)];
      if (!base.converged) continue;
      for (Index i = 0; i < n_rows; ++i) {
        y[i] = series.values(map[static_cast<std::size_t>(i)], cell);
      }
      FitOptions local = fit_opts;
      local.seed = derive_key(opts.seed, {kRefitTag, static_cast<std::uint64_t>(b)});
      local.stream = static_cast<std::uint64_t>(cell);
      try {
        const GevFit fit = fit_cell_warm(y, x, base.params, local);
        if (fit.converged) {
          out.rv(b, cell) = return_value(fit.params, point.r_years, point.xbar);
          out.mu0(b, cell) = fit.params.mu0;
          out.mu1(b, cell) = fit.params.mu1;
          out.sigma(b, cell) = fit.params.sigma;
          out.xi(b, cell) = fit.params.xi;
        }
      } catch (const DataError&) {
        // Resample landed under the observation floor; counts as a failure.
      }
    }
  });

  for (Index cell = 0; cell < n_cells; ++cell) {
    if (!point.cells[static_cast<std::size_t>(cell)].converged) continue;
    const int failures = static_cast<int>(out.rv.col(cell).isNaN().count());
    out.cell_failures[cell] = failures;
    if (failures > opts.max_failure_fraction * opts.B) out.warning = true;
  }
  return out;
}

double quantile(const ArrayXd& values, double p) {
  if (values.size() == 0) throw DataError("quantile: empty sample");
  if (!(p >= 0.0 && p <= 1.0)) throw DataError("quantile: p outside [0, 1]");
  std::vector<double> sorted(values.data(), values.data() + values.size());
  std::sort(sorted.begin(), sorted.end());
  const double h = p * static_cast<double>(sorted.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(h);
  if (lo + 1 >= sorted.size()) return sorted.back();
  const double frac = h - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

Interval basic_ci(double point, const ArrayXd& replicates, double level) {
  if (!(level > 0.0 && level < 1.0)) throw ConfigError("basic_ci: level outside (0, 1)");
  std::vector<double> finite;
  finite.reserve(static_cast<std::size_t>(replicates.size()));
  for (Index i = 0; i < replicates.size(); ++i) {
    if (std::isfinite(replicates[i])) finite.push_back(replicates[i]);
  }
  if (finite.size() < 30) {
    throw DataError("basic_ci: " + std::to_string(finite.size()) +
                    " usable replicates, need at least 30");
  }
  const ArrayXd kept = Eigen::Map<const ArrayXd>(finite.data(), static_cast<Index>(finite.size()));
  const double alpha = 1.0 - level;
  const double q_lo = quantile(kept, alpha / 2.0);
  const double q_hi = quantile(kept, 1.0 - alpha / 2.0);
  return Interval{2.0 * point - q_hi, 2.0 * point - q_lo};
}

}  // namespace xtreval
