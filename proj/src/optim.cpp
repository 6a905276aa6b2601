#include "xtreval/optim.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace xtreval {

OptimResult nelder_mead(const ObjectiveFn& f, const VectorXd& x0, const VectorXd& step,
                        const NelderMeadOptions& opts) {
  const Index n = x0.size();
  const Index m = n + 1;

  std::vector<VectorXd> xs(m, x0);
  std::vector<double> fs(m);
  for (Index i = 0; i < n; ++i) xs[i + 1][i] += step[i];
  for (Index i = 0; i < m; ++i) fs[i] = f(xs[i]);

  std::vector<Index> order(m);
  std::iota(order.begin(), order.end(), Index{0});
  auto sort_simplex = [&] {
    std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return fs[a] < fs[b]; });
  };

  int iter = 0;
  bool converged = false;
  for (; iter < opts.max_iters; ++iter) {
    sort_simplex();
    const Index best = order[0];
    const Index worst = order[m - 1];
    const Index second_worst = order[m - 2];

    if (std::isfinite(fs[worst])) {
      const double f_spread = fs[worst] - fs[best];
      double diameter = 0.0;
      for (Index i = 1; i < m; ++i) {
        diameter = std::max(diameter, (xs[order[i]] - xs[best]).cwiseAbs().maxCoeff());
      }
      if (f_spread <= opts.f_tol * (std::abs(fs[best]) + opts.f_tol) || diameter <= opts.x_tol) {
        converged = true;
        break;
      }
    }

    VectorXd centroid = VectorXd::Zero(n);
    for (Index i = 0; i < m; ++i) {
      if (i != worst) centroid += xs[i];
    }
    centroid /= static_cast<double>(n);

    const VectorXd reflected = centroid + (centroid - xs[worst]);
    const double f_reflected = f(reflected);

    if (f_reflected < fs[best]) {
      const VectorXd expanded = centroid + 2.0 * (centroid - xs[worst]);
      const double f_expanded = f(expanded);
      if (f_expanded < f_reflected) {
        xs[worst] = expanded;
        fs[worst] = f_expanded;
      } else {
        xs[worst] = reflected;
        fs[worst] = f_reflected;
      }
      continue;
    }
    if (f_reflected < fs[second_worst]) {
      xs[worst] = reflected;
      fs[worst] = f_reflected;
      continue;
    }

    const bool outside = f_reflected < fs[worst];
    const VectorXd contracted =
        centroid + 0.5 * ((outside ? reflected : xs[worst]) - centroid);
    const double f_contracted = f(contracted);
    if (f_contracted < std::min(f_reflected, fs[worst])) {
      xs[worst] = contracted;
      fs[worst] = f_contracted;
      continue;
    }

    // Shrink toward the best vertex.
    for (Index i = 0; i < m; ++i) {
      if (i == best) continue;
      xs[i] = xs[best] + 0.5 * (xs[i] - xs[best]);
      fs[i] = f(xs[i]);
    }
  }

  sort_simplex();
  OptimResult result;
  result.x = xs[order[0]];
  result.f = fs[order[0]];
  result.iterations = iter;
  result.converged = converged;
  return result;
}

OptimResult bfgs(const ObjectiveGradFn& fg, const VectorXd& x0, const BfgsOptions& opts) {
  const Index n = x0.size();
  VectorXd x = x0;
  VectorXd grad(n);
  double f = fg(x, grad);

  OptimResult result;
  result.x = x;
  result.f = f;
  if (!std::isfinite(f)) return result;  // cannot start outside the support

  Eigen::MatrixXd h_inv = Eigen::MatrixXd::Identity(n, n);
  int iter = 0;
  for (; iter < opts.max_iters; ++iter) {
    if (grad.cwiseAbs().maxCoeff() <= opts.grad_tol * std::max(1.0, std::abs(f))) {
      result.converged = true;
      break;
    }

    VectorXd direction = -(h_inv * grad);
    double slope = grad.dot(direction);
    if (!(slope < 0.0) || !direction.allFinite()) {  // reset on loss of descent
      h_inv.setIdentity();
      direction = -grad;
      slope = grad.dot(direction);
    }

    double step = 1.0;
    VectorXd x_new(n), grad_new(n);
    double f_new = std::numeric_limits<double>::infinity();
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls) {
      x_new = x + step * direction;
      f_new = fg(x_new, grad_new);
      if (std::isfinite(f_new) && f_new <= f + opts.armijo_c * step * slope) {
        accepted = true;
        break;
      }
      step *= opts.step_shrink;
    }
    if (!accepted) break;  // no acceptable step; gradient norm decides convergence

    const VectorXd s = x_new - x;
    const VectorXd yv = grad_new - grad;
    const double sy = s.dot(yv);
    if (sy > 1e-12 * s.norm() * yv.norm()) {
      const double rho = 1.0 / sy;
      const Eigen::MatrixXd iden = Eigen::MatrixXd::Identity(n, n);
      h_inv = (iden - rho * s * yv.transpose()) * h_inv * (iden - rho * yv * s.transpose()) +
              rho * s * s.transpose();
    }

    x = x_new;
    grad = grad_new;
    const double f_prev = f;
    f = f_new;
    if (std::abs(f_prev - f) <= 1e-14 * (std::abs(f) + 1e-14) &&
        grad.cwiseAbs().maxCoeff() <= 10.0 * opts.grad_tol * std::max(1.0, std::abs(f))) {
      result.converged = true;
      ++iter;
      break;
    }
  }

  result.x = x;
  result.f = f;
  result.iterations = iter;
  if (grad.cwiseAbs().maxCoeff() <= opts.grad_tol * std::max(1.0, std::abs(f))) {
    result.converged = true;
  }
  return result;
}

}  // namespace xtreval
