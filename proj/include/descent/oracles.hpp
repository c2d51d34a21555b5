#pragma once
// Gradient-oracle layer: the exact oracle, a bounded-noise stochastic oracle,
// and the artificially-injected-noise oracle used by restarted SGD.

#include <cstdint>

#include "descent/calculus.hpp"
#include "descent/numerics.hpp"
#include "descent/problems.hpp"

namespace descent {

enum class OracleKind { exact, ball_noise, injected };

// Value-semantic oracle handle: copies carry independent call counters, and
// concurrent runs use independent instances.  The objective is referenced,
// not owned, and must outlive the oracle.
struct GradientOracle {
  OracleKind kind = OracleKind::exact;
  const Objective* objective = nullptr;
  ScalarFn sigma_fn;         // noise-envelope radius as a function of F(w)
  double sigma_tilde = 0.0;  // injected-noise magnitude
  std::int64_t call_count = 0;

  // One oracle query; increments call_count exactly once.
  //   exact       g = grad F(w)
  //   ball_noise  g = grad F(w) + xi, xi uniform in the ball of radius
  //               sigma_fn(F(w))
  //   injected    ball_noise result plus sigma_tilde * Lambda, Lambda uniform
  //               in the unit ball
  // Every draw satisfies ||g - grad F(w)|| <= sigma_fn(F(w)) + sigma_tilde
  // deterministically, with no tolerance.
  Vec query(const Vec& w, Rng& rng);
};

GradientOracle make_exact_oracle(const Objective& objective);
GradientOracle make_ball_noise_oracle(const Objective& objective,
                                      ScalarFn sigma_fn);
GradientOracle make_injected_oracle(const Objective& objective,
                                    ScalarFn sigma_fn, double sigma_tilde);

// Operator-norm bound on the Hessian of a sampled gradient field at function
// value fval, given the sampled gradient norm.  Additive noise independent of
// w leaves the sampled Hessian equal to the true one, so the bound is the
// objective's own Hessian envelope evaluated at fval; grad_norm only
// participates in validation.  Throws std::invalid_argument for oracle kinds
// whose noise is not state-independent additive (none of the built-in kinds).
double oracle_hessian_bound(const GradientOracle& oracle, double grad_norm,
                            double fval);

}  // namespace descent
