#include "descent/oracles.hpp"

#include <cmath>
#include <stdexcept>

namespace descent {

namespace {

double noise_radius(const ScalarFn& sigma_fn, double fval) {
  if (!sigma_fn) return 0.0;
  const double r = sigma_fn(fval);
  if (!std::isfinite(r) || r < 0.0)
    throw std::domain_error(
        "GradientOracle: sigma_fn must be finite and non-negative");
  return r;
}

}  // namespace

Vec GradientOracle::query(const Vec& w, Rng& rng) {
  if (objective == nullptr)
    throw std::invalid_argument("GradientOracle: objective not set");
  require_finite(w, "GradientOracle::query");
  ++call_count;
  Vec g = objective->eval_gradient(w);
  if (kind == OracleKind::exact) return g;

  const double radius = noise_radius(sigma_fn, objective->eval_value(w));
  if (radius > 0.0) {
    const Vec xi = sample_uniform_ball(rng, objective->dim, radius);
    axpy(1.0, xi, g);
  }
  if (kind == OracleKind::injected && sigma_tilde > 0.0) {
    const Vec lam = sample_uniform_ball(rng, objective->dim, sigma_tilde);
    axpy(1.0, lam, g);
  }
  return g;
}

GradientOracle make_exact_oracle(const Objective& objective) {
  GradientOracle o;
  o.kind = OracleKind::exact;
  o.objective = &objective;
  return o;
}

GradientOracle make_ball_noise_oracle(const Objective& objective,
                                      ScalarFn sigma_fn) {
  if (!sigma_fn)
    throw std::invalid_argument("make_ball_noise_oracle: sigma_fn not set");
  GradientOracle o;
  o.kind = OracleKind::ball_noise;
  o.objective = &objective;
  o.sigma_fn = std::move(sigma_fn);
  return o;
}

GradientOracle make_injected_oracle(const Objective& objective,
                                    ScalarFn sigma_fn, double sigma_tilde) {
  if (!(sigma_tilde >= 0.0) || !std::isfinite(sigma_tilde))
    throw std::invalid_argument(
        "make_injected_oracle: sigma_tilde must be finite and non-negative");
  GradientOracle o;
  o.kind = OracleKind::injected;
  o.objective = &objective;
  o.sigma_fn = std::move(sigma_fn);  // may be empty: purely injected noise
  o.sigma_tilde = sigma_tilde;
  return o;
}

double oracle_hessian_bound(const GradientOracle& oracle, double grad_norm,
                            double fval) {
  if (oracle.objective == nullptr)
    throw std::invalid_argument("oracle_hessian_bound: objective not set");
  if (!std::isfinite(grad_norm) || grad_norm < 0.0)
    throw std::invalid_argument("oracle_hessian_bound: bad grad_norm");
  if (!std::isfinite(fval) || fval < 0.0)
    throw std::invalid_argument("oracle_hessian_bound: bad fval");
  switch (oracle.kind) {
    case OracleKind::exact:
    case OracleKind::ball_noise:
    case OracleKind::injected:
      return oracle.objective->profile.rho1(fval);
  }
  throw std::invalid_argument("oracle_hessian_bound: unsupported oracle kind");
}

}  // namespace descent
