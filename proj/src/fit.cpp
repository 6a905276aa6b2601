#include "xtreval/fit.hpp"

#include <cmath>
#include <string>

#include "xtreval/optim.hpp"
#include "xtreval/parallel.hpp"
#include "xtreval/rng.hpp"

namespace xtreval {

namespace {

GevParams unpack(const VectorXd& th) {
  return GevParams{th[0], th[1], std::exp(th[2]), th[3]};
}

VectorXd pack(const GevParams& p) {
  VectorXd th(4);
  th << p.mu0, p.mu1, std::log(p.sigma), p.xi;
  return th;
}

struct Attempt {
  VectorXd x;
  double f = std::numeric_limits<double>::infinity();
  int iterations = 0;
  bool converged = false;
};

bool better(const Attempt& a, const Attempt& b) {
  if (a.converged != b.converged) return a.converged;
  return a.f < b.f;
}

struct CellProblem {
  ArrayXd y;
  ArrayXd x;

  double operator()(const VectorXd& th) const { return gev_neg_loglik(unpack(th), y, x); }
  double operator()(const VectorXd& th, VectorXd& g) const {
    Eigen::Array<double, 4, 1> grad;
    const double v = gev_neg_loglik_grad(unpack(th), y, x, grad);
    g = grad.matrix();
    return v;
  }

  /// Convergence is re-checked from the gradient at the final point, never
  /// taken from the optimizer's own bookkeeping.
  Attempt grade(const OptimResult& r, double grad_tol) const {
    Attempt a;
    a.x = r.x;
    a.iterations = r.iterations;
    VectorXd g(4);
    a.f = (*this)(r.x, g);
    a.converged = std::isfinite(a.f) &&
                  g.cwiseAbs().maxCoeff() <= grad_tol * std::max(1.0, std::abs(a.f));
    return a;
  }

  /// Quasi-Newton from th0; on non-convergence, a simplex pass plus a
  /// quasi-Newton polish.
  Attempt run(const VectorXd& th0, const VectorXd& nm_step, double grad_tol) const {
    const ObjectiveGradFn fg = [this](const VectorXd& th, VectorXd& g) { return (*this)(th, g); };
    const ObjectiveFn f = [this](const VectorXd& th) { return (*this)(th); };

    BfgsOptions bopts;
    bopts.grad_tol = grad_tol;
    Attempt best = grade(bfgs(fg, th0, bopts), grad_tol);
    if (best.converged) return best;

    const VectorXd nm_start = std::isfinite(best.f) ? best.x : th0;
    const OptimResult simplex = nelder_mead(f, nm_start, nm_step, NelderMeadOptions{});
    Attempt polished = grade(bfgs(fg, simplex.x, bopts), grad_tol);
    polished.iterations += best.iterations + simplex.iterations;
    if (polished.converged || !(best.f <= polished.f)) return polished;
    best.iterations = polished.iterations;
    return best;
  }
};

GevFit fit_core(CellProblem problem, Index n_effective, const FitOptions& opts,
                const GevParams* warm_start) {
  GevFit fit;
  fit.n_effective = n_effective;

  const Index n = problem.y.size();
  const double mean = problem.y.mean();
  const double sd = std::sqrt((problem.y - mean).square().sum() / static_cast<double>(n - 1));
  if (!(sd > 0.0)) {
    // All observations identical: sigma -> 0 sends the likelihood to -inf.
    fit.params = GevParams{mean, 0.0, std::numeric_limits<double>::quiet_NaN(),
                           std::numeric_limits<double>::quiet_NaN()};
    fit.neg_loglik = -std::numeric_limits<double>::infinity();
    return fit;
  }

  const double sigma0 = sd * std::sqrt(6.0) / kPi;
  VectorXd th0(4);
  th0 << mean - 0.5772 * sigma0, 0.0, std::log(sigma0), 0.05;

  VectorXd nm_step(4);
  nm_step << 0.25 * sigma0, 0.25 * sigma0, 0.25, 0.1;

  Attempt best;
  int total_iterations = 0;
  if (warm_start != nullptr && warm_start->sigma > 0.0) {
    best = problem.run(pack(*warm_start), nm_step, opts.grad_tol);
    total_iterations += best.iterations;
  }
  if (!best.converged) {
    Attempt cold = problem.run(th0, nm_step, opts.grad_tol);
    total_iterations += cold.iterations;
    if (better(cold, best)) best = cold;
  }
  for (int k = 0; k < opts.max_restarts && !best.converged; ++k) {
    CounterRng rng(opts.seed, {0x6669745265ULL, opts.stream, static_cast<std::uint64_t>(k)});
    VectorXd th = th0;
    th[0] += 0.5 * sigma0 * rng.normal();
    th[1] += 0.5 * sigma0 * rng.normal();
    th[2] += 0.5 * rng.normal();
    th[3] = 0.05 + 0.2 * rng.normal();
    Attempt attempt = problem.run(th, nm_step, opts.grad_tol);
    total_iterations += attempt.iterations;
    if (better(attempt, best)) best = attempt;
  }

  fit.iterations = total_iterations;
  if (std::isfinite(best.f)) {
    fit.params = unpack(best.x);
    fit.neg_loglik = best.f;
    fit.converged = best.converged;
  }
  return fit;
}

CellProblem drop_missing(const ArrayXd& y, const ArrayXd& x, const FitOptions& opts,
                         const char* who) {
  if (y.size() != x.size()) throw DataError(std::string(who) + ": covariate length mismatch");

  CellProblem problem;
  problem.y.resize(y.size());
  problem.x.resize(x.size());
  Index n = 0;
  for (Index i = 0; i < y.size(); ++i) {
    if (is_missing(y[i])) continue;
    problem.y[n] = y[i];
    problem.x[n] = x[i];
    ++n;
  }
  if (n < opts.min_obs) {
    throw DataError(std::string(who) + ": " + std::to_string(n) + " observations, floor is " +
                    std::to_string(opts.min_obs));
  }
  problem.y.conservativeResize(n);
  problem.x.conservativeResize(n);
  return problem;
}

}  // namespace

GevFit fit_cell(const ArrayXd& y, const ArrayXd& x, const FitOptions& opts) {
  CellProblem problem = drop_missing(y, x, opts, "fit_cell");
  const Index n = problem.y.size();
  return fit_core(std::move(problem), n, opts, nullptr);
}

GevFit fit_cell_warm(const ArrayXd& y, const ArrayXd& x, const GevParams& start,
                     const FitOptions& opts) {
  CellProblem problem = drop_missing(y, x, opts, "fit_cell_warm");
  const Index n = problem.y.size();
  return fit_core(std::move(problem), n, opts, &start);
}

ArrayXd observation_covariate(const SeasonMaxSeries& series, const CovariateSeries& covariate) {
  ArrayXd x(series.values.rows());
  for (Index t = 0; t < series.n_years(); ++t) {
    const double value = covariate.at_year(series.season_years[static_cast<std::size_t>(t)]);
    for (Index m = 0; m < series.n_replicates; ++m) x[t * series.n_replicates + m] = value;
  }
  return x;
}

FieldFit fit_field(const SeasonMaxSeries& series, const CovariateSeries& covariate,
                   double r_years, const FitOptions& opts) {
  series.validate();
  covariate.validate();
  const ArrayXd x = observation_covariate(series, covariate);
  const Index n_cells = series.values.cols();

  FieldFit out;
  out.r_years = r_years;
  out.xbar = covariate.xbar;
  out.cells.resize(static_cast<std::size_t>(n_cells));
  out.rv = ArrayXd::Constant(n_cells, kMissing);

  parallel_for(n_cells, opts.workers, [&](Index cell) {
    const ArrayXd y = series.values.col(cell);
    const Index n_obs = y.size() - y.isNaN().count();
    GevFit& fit = out.cells[static_cast<std::size_t>(cell)];
    if (n_obs < opts.min_obs) {
      fit.n_effective = n_obs;
      return;
    }
    FitOptions local = opts;
    local.stream = static_cast<std::uint64_t>(cell);
    fit = fit_cell(y, x, local);
    if (fit.converged) out.rv[cell] = return_value(fit.params, r_years, out.xbar);
  });
  return out;
}

}  // namespace xtreval
