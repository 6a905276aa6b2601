#pragma once

#include <functional>

#include "xtreval/types.hpp"

namespace xtreval {

using ObjectiveFn = std::function<double(const VectorXd&)>;
/// Returns f(x) and fills grad; grad is meaningful only for finite f.
using ObjectiveGradFn = std::function<double(const VectorXd&, VectorXd&)>;

struct OptimResult {
  VectorXd x;
  double f = 0.0;
  int iterations = 0;
  bool converged = false;
};

struct NelderMeadOptions {
  int max_iters = 2000;
  double f_tol = 1e-12;  // relative spread of simplex values
  double x_tol = 1e-10;  // simplex diameter
};

/// Derivative-free simplex minimization. `step` sets the initial simplex
/// extent per coordinate. Infinite objective values act as rejections, which
/// keeps the search inside the GEV support region.
OptimResult nelder_mead(const ObjectiveFn& f, const VectorXd& x0, const VectorXd& step,
                        const NelderMeadOptions& opts = {});

struct BfgsOptions {
  int max_iters = 200;
  double grad_tol = 1e-8;   // infinity norm, scaled by max(1, |f|)
  double step_shrink = 0.5;
  double armijo_c = 1e-4;
};

/// Quasi-Newton minimization with backtracking line search. Points where f
/// is not finite are rejected by the line search.
OptimResult bfgs(const ObjectiveGradFn& fg, const VectorXd& x0, const BfgsOptions& opts = {});

}  // namespace xtreval
