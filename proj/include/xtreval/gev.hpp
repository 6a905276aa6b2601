#pragma once

#include <cmath>
#include <limits>

#include "xtreval/errors.hpp"
#include "xtreval/rng.hpp"
#include "xtreval/types.hpp"

namespace xtreval {

/// Climatological coefficients of the nonstationary GEV: the location is
/// mu0 + mu1 * X_t with X_t the smoothed GMT anomaly; scale and shape are
/// constant in time.
template <class Scalar>
struct GevParamsT {
  Scalar mu0 = 0;    // mm
  Scalar mu1 = 0;    // mm per kelvin
  Scalar sigma = 1;  // mm, > 0
  Scalar xi = 0;     // dimensionless
};

using GevParams = GevParamsT<double>;

/// |xi| below this uses the Gumbel limit branch.
inline constexpr double kXiEps = 1e-6;

/// Negative log-likelihood of observations y with per-observation covariate
/// x. Returns +infinity on support violations (any 1 + xi*(y-mu_t)/sigma <= 0)
/// or non-positive sigma. Throws DataError on empty input.
template <class Scalar>
Scalar gev_neg_loglik(const GevParamsT<Scalar>& p, const ArrayX<Scalar>& y,
                      const ArrayX<Scalar>& x) {
  using std::abs;
  using std::isfinite;
  using std::log;

  const Index n = y.size();
  if (n == 0) throw DataError("gev_neg_loglik: no observations");
  if (x.size() != n) throw DataError("gev_neg_loglik: covariate length mismatch");
  constexpr Scalar inf = std::numeric_limits<Scalar>::infinity();
  if (!(p.sigma > Scalar(0)) || !isfinite(static_cast<double>(p.xi))) return inf;

  const ArrayX<Scalar> a = (y - p.mu0 - p.mu1 * x) / p.sigma;
  const Scalar log_sigma = log(p.sigma);

  if (abs(p.xi) < Scalar(kXiEps)) {
    return Scalar(n) * log_sigma + a.sum() + (-a).exp().sum();
  }

  const ArrayX<Scalar> z = Scalar(1) + p.xi * a;
  if ((z <= Scalar(0)).any()) return inf;
  const ArrayX<Scalar> lz = z.log();
  return Scalar(n) * log_sigma + (Scalar(1) + Scalar(1) / p.xi) * lz.sum() +
         (lz * (Scalar(-1) / p.xi)).exp().sum();
}

/// Negative log-likelihood and its gradient with respect to the transformed
/// parameters (mu0, mu1, log sigma, xi). The gradient is meaningful only
/// when the returned value is finite. Within the Gumbel branch the xi
/// component is 0 (the branch is constant in xi).
template <class Scalar>
Scalar gev_neg_loglik_grad(const GevParamsT<Scalar>& p, const ArrayX<Scalar>& y,
                           const ArrayX<Scalar>& x, Eigen::Array<Scalar, 4, 1>& grad) {
  using std::abs;
  using std::isfinite;
  using std::log;

  const Index n = y.size();
  if (n == 0) throw DataError("gev_neg_loglik_grad: no observations");
  if (x.size() != n) throw DataError("gev_neg_loglik_grad: covariate length mismatch");
  constexpr Scalar inf = std::numeric_limits<Scalar>::infinity();
  grad.setConstant(std::numeric_limits<Scalar>::quiet_NaN());
  if (!(p.sigma > Scalar(0)) || !isfinite(static_cast<double>(p.xi))) return inf;

  const ArrayX<Scalar> a = (y - p.mu0 - p.mu1 * x) / p.sigma;
  const Scalar log_sigma = log(p.sigma);

  if (abs(p.xi) < Scalar(kXiEps)) {
    const ArrayX<Scalar> em = (-a).exp();
    const ArrayX<Scalar> one_minus_em = Scalar(1) - em;
    grad[0] = -one_minus_em.sum() / p.sigma;
    grad[1] = -(x * one_minus_em).sum() / p.sigma;
    grad[2] = Scalar(n) - (a * one_minus_em).sum();
    grad[3] = Scalar(0);
    return Scalar(n) * log_sigma + a.sum() + em.sum();
  }

  const ArrayX<Scalar> z = Scalar(1) + p.xi * a;
  if ((z <= Scalar(0)).any()) return inf;
  const ArrayX<Scalar> lz = z.log();
  const Scalar inv_xi = Scalar(1) / p.xi;
  const ArrayX<Scalar> e = (lz * -inv_xi).exp();  // z^(-1/xi)

  // d nll / d z per observation.
  const ArrayX<Scalar> g = ((Scalar(1) + inv_xi) - inv_xi * e) / z;

  grad[0] = -(p.xi / p.sigma) * g.sum();
  grad[1] = -(p.xi / p.sigma) * (x * g).sum();
  grad[2] = Scalar(n) - p.xi * (g * a).sum();
  grad[3] = (-inv_xi * inv_xi * lz + (Scalar(1) + inv_xi) * a / z +
             e * (inv_xi * inv_xi * lz - inv_xi * a / z))
                .sum();

  return Scalar(n) * log_sigma + (Scalar(1) + inv_xi) * lz.sum() + e.sum();
}

/// CDF of the fitted distribution at covariate value x_t.
template <class Scalar>
Scalar gev_cdf(const GevParamsT<Scalar>& p, Scalar value, Scalar x_t) {
  using std::abs;
  using std::exp;
  using std::log;
  using std::pow;

  const Scalar mu_t = p.mu0 + p.mu1 * x_t;
  if (abs(p.xi) < Scalar(kXiEps)) {
    return exp(-exp(-(value - mu_t) / p.sigma));
  }
  const Scalar z = Scalar(1) + p.xi * (value - mu_t) / p.sigma;
  if (z <= Scalar(0)) return p.xi > Scalar(0) ? Scalar(0) : Scalar(1);
  return exp(-pow(z, Scalar(-1) / p.xi));
}

namespace detail {

template <class Scalar>
Scalar gev_quantile_core(Scalar mu_t, Scalar sigma, Scalar xi, Scalar prob) {
  using std::abs;
  using std::log;
  using std::pow;
  const Scalar c = -log(prob);
  if (abs(xi) < Scalar(kXiEps)) return mu_t - sigma * log(c);
  return mu_t - (sigma / xi) * (Scalar(1) - pow(c, -xi));
}

}  // namespace detail

/// prob-quantile of the distribution at covariate value x_t.
template <class Scalar>
Scalar gev_quantile(const GevParamsT<Scalar>& p, Scalar prob, Scalar x_t) {
  if (!(prob > Scalar(0) && prob < Scalar(1))) {
    throw DataError("gev_quantile: probability must lie in (0, 1)");
  }
  if (!(p.sigma > Scalar(0))) throw DataError("gev_quantile: sigma must be positive");
  return detail::gev_quantile_core(p.mu0 + p.mu1 * x_t, p.sigma, p.xi, prob);
}

/// Closed-form r-year return value at the baseline covariate mean: the
/// 1 - 1/r quantile of the fitted distribution at X = xbar.
template <class Scalar>
Scalar return_value(const GevParamsT<Scalar>& p, Scalar r_years, Scalar xbar) {
  if (!(r_years > Scalar(1))) throw DataError("return_value: return period must exceed 1 year");
  return gev_quantile(p, Scalar(1) - Scalar(1) / r_years, xbar);
}

/// Draws one value by inverting the CDF at a uniform u; with u forced to
/// 1 - 1/r this reproduces return_value exactly.
inline double gev_sample(const GevParams& p, double x_t, CounterRng& rng) {
  return detail::gev_quantile_core(p.mu0 + p.mu1 * x_t, p.sigma, p.xi, rng.uniform());
}

}  // namespace xtreval
