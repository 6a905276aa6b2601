#include "xtreval/metrics.hpp"

#include <cmath>

namespace xtreval {

namespace {

bool usable(const ArrayXd& model, const ArrayXd& ref, const ArrayXb& mask, Index c) {
  return mask[c] && !is_missing(model[c]) && !is_missing(ref[c]);
}

Index usable_count(const ArrayXd& model, const ArrayXd& ref, const ArrayXb& mask) {
  Index n = 0;
  for (Index c = 0; c < mask.size(); ++c) {
    if (usable(model, ref, mask, c)) ++n;
  }
  return n;
}

void check_sizes(const ArrayXd& model, const ArrayXd& ref, const ArrayXb& mask,
                 const ArrayXd& weights, const char* who) {
  const Index n = model.size();
  if (ref.size() != n || mask.size() != n || weights.size() != n) {
    throw DataError(std::string(who) + ": field, mask and weight sizes differ");
  }
}

}  // namespace

double extreme_bias(const ArrayXd& model_rv, const ArrayXd& ref_rv, const ArrayXb& mask,
                    const ArrayXd& weights, bool absolute) {
  check_sizes(model_rv, ref_rv, mask, weights, "extreme_bias");
  double num = 0.0;
  double total = 0.0;
  for (Index c = 0; c < mask.size(); ++c) {
    if (!usable(model_rv, ref_rv, mask, c)) continue;
    const double d = model_rv[c] - ref_rv[c];
    num += weights[c] * (absolute ? std::abs(d) : d);
    total += weights[c];
  }
  if (!(total > 0.0)) throw DataError("extreme_bias: no usable cells under the mask");
  return num / total;
}

TaylorStats taylor_stats(const ArrayXd& model_rv, const ArrayXd& ref_rv, const ArrayXb& mask,
                         const ArrayXd& weights) {
  check_sizes(model_rv, ref_rv, mask, weights, "taylor_stats");
  if (usable_count(model_rv, ref_rv, mask) < 3) {
    throw DataError("taylor_stats: need at least 3 usable cells");
  }

  double total = 0.0, mean_m = 0.0, mean_r = 0.0;
  for (Index c = 0; c < mask.size(); ++c) {
    if (!usable(model_rv, ref_rv, mask, c)) continue;
    total += weights[c];
    mean_m += weights[c] * model_rv[c];
    mean_r += weights[c] * ref_rv[c];
  }
  if (!(total > 0.0)) throw DataError("taylor_stats: zero total weight under the mask");
  mean_m /= total;
  mean_r /= total;

  double var_m = 0.0, var_r = 0.0, cov = 0.0;
  for (Index c = 0; c < mask.size(); ++c) {
    if (!usable(model_rv, ref_rv, mask, c)) continue;
    const double am = model_rv[c] - mean_m;
    const double ar = ref_rv[c] - mean_r;
    var_m += weights[c] * am * am;
    var_r += weights[c] * ar * ar;
    cov += weights[c] * am * ar;
  }
  var_m /= total;
  var_r /= total;
  cov /= total;

  TaylorStats stats;
  stats.s_ref = std::sqrt(var_r);
  stats.s_model = std::sqrt(var_m);
  if (!(stats.s_ref > 0.0)) {
    throw DataError("taylor_stats: constant reference field, correlation undefined");
  }
  if (!(stats.s_model > 0.0)) {
    stats.ratio = 0.0;
    stats.r = kMissing;
    stats.skill = kMissing;
    return stats;
  }
  stats.r = cov / (stats.s_model * stats.s_ref);
  stats.ratio = stats.s_model / stats.s_ref;
  const double s1 = stats.s_model, s2 = stats.s_ref;
  stats.skill = std::exp(-(s1 * s1 + s2 * s2 - 2.0 * s1 * s2 * stats.r) / (2.0 * s1 * s2));
  return stats;
}

TaylorCoordinates taylor_coordinates(const TaylorStats& stats) {
  TaylorCoordinates c;
  c.radius = stats.ratio;
  c.angle_rad = std::acos(std::clamp(stats.r, -1.0, 1.0));
  c.skill = stats.skill;
  return c;
}

ApproachComparison compare_approaches(const ArrayXd& model_rv, const ArrayXd& ref_rv,
                                      const ArrayXXd& model_rv_boot, const ArrayXXd& ref_rv_boot,
                                      const std::vector<CellMask>& masks,
                                      const std::vector<std::pair<std::string, ArrayXb>>& regions,
                                      const ArrayXd& weights, double level, bool absolute) {
  const Index n_cells = model_rv.size();
  const Index B = model_rv_boot.rows();
  if (ref_rv_boot.rows() != B) {
    throw DataError("compare_approaches: bootstrap replicate counts differ");
  }
  if (B > 0 && (model_rv_boot.cols() != n_cells || ref_rv_boot.cols() != n_cells)) {
    throw DataError("compare_approaches: bootstrap fields are not on the point grid");
  }
  for (const CellMask& m : masks) {
    if (m.included.size() != n_cells) {
      throw DataError("compare_approaches: mask '" + m.provenance + "' is not on the point grid");
    }
  }

  const double nan = kMissing;
  ApproachComparison out;
  for (const auto& [region_name, region_cells] : regions) {
    // Replicate biases per approach, kept for the paired change rows.
    std::vector<ArrayXd> replicate_biases(masks.size());
    std::vector<double> point_biases(masks.size(), nan);
    std::vector<bool> evaluated(masks.size(), false);

    for (std::size_t a = 0; a < masks.size(); ++a) {
      const ArrayXb eff = masks[a].included && region_cells;
      EvalReport report;
      report.region = region_name;
      report.approach = masks[a].provenance;
      report.bias_ci = Interval{nan, nan};
      try {
        report.bias = extreme_bias(model_rv, ref_rv, eff, weights, absolute);
        report.taylor = taylor_stats(model_rv, ref_rv, eff, weights);
      } catch (const DataError& e) {
        out.warnings.push_back("region " + region_name + ", " + masks[a].provenance +
                               " skipped: " + e.what());
        continue;
      }
      report.n_cells = usable_count(model_rv, ref_rv, eff);

      if (B > 0) {
        ArrayXd biases = ArrayXd::Constant(B, nan);
        for (Index b = 0; b < B; ++b) {
          const ArrayXd mrow = model_rv_boot.row(b);
          const ArrayXd rrow = ref_rv_boot.row(b);
          try {
            biases[b] = extreme_bias(mrow, rrow, eff, weights, absolute);
          } catch (const DataError&) {
          }
        }
        const Index failed = biases.isNaN().count();
        if (failed * 10 > B) {
          out.warnings.push_back("region " + region_name + ", " + masks[a].provenance + ": " +
                                 std::to_string(failed) + " of " + std::to_string(B) +
                                 " replicates unusable");
        }
        try {
          report.bias_ci = basic_ci(report.bias, biases, level);
        } catch (const DataError& e) {
          out.warnings.push_back("region " + region_name + ", " + masks[a].provenance +
                                 ": no interval: " + e.what());
        }
        replicate_biases[a] = std::move(biases);
      }
      point_biases[a] = report.bias;
      evaluated[a] = true;
      out.reports.push_back(std::move(report));
    }

    // Paired change in bias against the station-cell approach.
    std::size_t base = masks.size();
    for (std::size_t a = 0; a < masks.size(); ++a) {
      if (masks[a].provenance == approach::kA1 && evaluated[a]) {
        base = a;
        break;
      }
    }
    if (base == masks.size() || B == 0) continue;
    for (std::size_t a = 0; a < masks.size(); ++a) {
      if (a == base || !evaluated[a]) continue;
      BiasChange change;
      change.region = region_name;
      change.approach = masks[a].provenance;
      change.delta = point_biases[a] - point_biases[base];
      change.ci = Interval{nan, nan};
      const ArrayXd deltas = replicate_biases[a] - replicate_biases[base];
      try {
        change.ci = basic_ci(change.delta, deltas, level);
      } catch (const DataError& e) {
        out.warnings.push_back("region " + region_name + ", " + masks[a].provenance +
                               ": no change interval: " + e.what());
      }
      out.changes.push_back(std::move(change));
    }
  }
  return out;
}

}  // namespace xtreval
