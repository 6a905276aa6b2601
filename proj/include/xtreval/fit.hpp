#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "xtreval/field.hpp"
#include "xtreval/gev.hpp"

namespace xtreval {

struct FitOptions {
  Index min_obs = 10;        // per-cell observation floor
  int max_restarts = 3;      // jittered restarts after the moment start fails
  double grad_tol = 1e-6;    // inf-norm on (mu0, mu1, log sigma, xi), scaled by max(1, |nll|)
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;  // distinguishes jitter streams across cells
  int workers = 0;           // fit_field fan-out; 0 = hardware concurrency
};

struct GevFit {
  GevParams params;
  double neg_loglik = std::numeric_limits<double>::quiet_NaN();
  bool converged = false;
  int iterations = 0;
  Index n_effective = 0;
};

/// Maximum-likelihood fit of one cell's pooled (year, replicate) maxima with
/// per-observation covariate x. Missing y entries are dropped together with
/// their covariate values. Optimizes over (mu0, mu1, log sigma, xi) from a
/// moment start, quasi-Newton first, simplex fallback, then jittered
/// restarts; converged means the gradient inf-norm met grad_tol. Constant
/// data comes back flagged non-converged (the likelihood is unbounded as
/// sigma -> 0). Throws DataError below the observation floor or on length
/// mismatch.
GevFit fit_cell(const ArrayXd& y, const ArrayXd& x, const FitOptions& opts = {});

/// fit_cell seeded from a caller-supplied start (falls back to the cold
/// moment-start path when the warm attempt does not converge). Used for
/// bootstrap replicate refits around the point estimate.
GevFit fit_cell_warm(const ArrayXd& y, const ArrayXd& x, const GevParams& start,
                     const FitOptions& opts = {});

/// Covariate value for each (year, replicate) row of the series.
ArrayXd observation_covariate(const SeasonMaxSeries& series, const CovariateSeries& covariate);

struct FieldFit {
  std::vector<GevFit> cells;
  ArrayXd rv;  // r-year return value at X = xbar; NaN where the cell failed
  double r_years = 20.0;
  double xbar = 0.0;
};

/// Independent per-cell fits. Cells under the observation floor or without a
/// converged fit keep a default GevFit (n_effective still reported) and a
/// missing return value. Deterministic for fixed options and any worker
/// count.
FieldFit fit_field(const SeasonMaxSeries& series, const CovariateSeries& covariate,
                   double r_years = 20.0, const FitOptions& opts = {});

}  // namespace xtreval
