#pragma once

#include <string>
#include <vector>

#include "xtreval/bootstrap.hpp"
#include "xtreval/sampling.hpp"

namespace xtreval {

/// Centered, area-weighted Taylor-diagram statistics of a model field
/// against a reference field. A constant model field is flagged with
/// ratio = 0 and NaN correlation/skill.
struct TaylorStats {
  double r = 0.0;        // weighted centered pattern correlation
  double s_model = 0.0;  // weighted spatial standard deviation, model
  double s_ref = 0.0;    // weighted spatial standard deviation, reference
  double ratio = 0.0;    // s_model / s_ref
  double skill = 0.0;    // exp{-(s1^2 + s2^2 - 2 s1 s2 r) / (2 s1 s2)}
};

struct TaylorCoordinates {
  double radius = 0.0;     // standard-deviation ratio
  double angle_rad = 0.0;  // arccos r, in [0, pi]
  double skill = 0.0;
};

/// Area-weighted mean of (model - reference) over the mask, cells missing in
/// either field dropped pairwise. Positive means the model is too wet. With
/// absolute = true the per-cell absolute difference is averaged instead.
/// Throws DataError when no usable cell remains.
double extreme_bias(const ArrayXd& model_rv, const ArrayXd& ref_rv, const ArrayXb& mask,
                    const ArrayXd& weights, bool absolute = false);

/// Weighted centered pattern statistics over the mask (pairwise-complete
/// cells only). Requires >= 3 usable cells and a non-constant reference.
TaylorStats taylor_stats(const ArrayXd& model_rv, const ArrayXd& ref_rv, const ArrayXb& mask,
                         const ArrayXd& weights);

TaylorCoordinates taylor_coordinates(const TaylorStats& stats);

/// One region-by-approach evaluation row.
struct EvalReport {
  std::string region;
  std::string approach;
  double bias = 0.0;
  Interval bias_ci;
  TaylorStats taylor;
  Index n_cells = 0;
};

/// Change in bias of an approach against the station-cell baseline, with its
/// paired bootstrap interval (both biases evaluated on the same replicate).
struct BiasChange {
  std::string region;
  std::string approach;
  double delta = 0.0;
  Interval ci;
};

struct ApproachComparison {
  std::vector<EvalReport> reports;
  std::vector<BiasChange> changes;
  std::vector<std::string> warnings;
};

/// Evaluates every (region, approach) pair: point bias and Taylor stats plus
/// basic bootstrap intervals from the replicate return-value fields (rows of
/// model_rv_boot / ref_rv_boot are replicates sharing year resamples).
/// Change-in-bias rows compare each approach against the approach whose
/// provenance is the station mask, per replicate. Regions or approaches with
/// no usable cells are skipped with a warning. Pass empty (0-row) bootstrap
/// arrays to skip all intervals.
ApproachComparison compare_approaches(const ArrayXd& model_rv, const ArrayXd& ref_rv,
                                      const ArrayXXd& model_rv_boot, const ArrayXXd& ref_rv_boot,
                                      const std::vector<CellMask>& masks,
                                      const std::vector<std::pair<std::string, ArrayXb>>& regions,
                                      const ArrayXd& weights, double level = 0.95,
                                      bool absolute = false);

}  // namespace xtreval
