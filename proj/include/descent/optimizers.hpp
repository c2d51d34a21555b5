#pragma once
// Parameter builders and decrease-procedure constructions for the five
// first-order methods: gradient descent, adaptive gradient descent, blocked
// SGD, perturbed gradient descent, and restarted SGD.  Each builder derives
// schedule constants from the objective's regularity profile; each
// *_procedure wraps one method as a DecreaseProcedure for the generic driver.

#include <cstdint>

#include "descent/calculus.hpp"
#include "descent/framework.hpp"
#include "descent/oracles.hpp"
#include "descent/problems.hpp"

namespace descent {

struct GdParams {
  double eta = 0.0;
};

// eta = scale / L1.  scale = 1 is the certified schedule; larger values are
// practical overrides.
GdParams build_gd(const EffectiveConstants& consts, double scale = 1.0);

// Decrease procedure for fixed-step gradient descent toward an eps-FOSP:
// per-step decrease promise eta * eps^2 / 2, one oracle call per step.
DecreaseProcedure gd_procedure(const Objective& objective,
                               const GdParams& params, double eps);

struct AdaptiveGdParams {
  double L1_prime = 0.0;    // local curvature bound on the initial sublevel set
  double rho0_F0p1 = 0.0;   // gradient-norm bound on the same set
  double scale = 1.0;
};

AdaptiveGdParams build_adaptive_gd(const EffectiveConstants& consts,
                                   double scale = 1.0);

// Gradient descent with the clamped step eta_t = min{1/L1', 1/(rho0 *
// ||grad||)}; decrease promise min{L1'/(2 rho0^2), eps^2/(2 L1')}.
DecreaseProcedure adaptive_gd_procedure(const Objective& objective,
                                        const AdaptiveGdParams& params,
                                        double eps);

struct SgdParams {
  double eta = 0.0;          // per-step size actually used
  std::int64_t K0 = 0;       // block length
  double eps = 0.0;
  double delta_conf = 0.0;   // overall confidence budget
  double p_block = 0.0;      // per-block failure probability
  // Derivation diagnostics.
  double eta_tilde = 0.0;    // pre-clamp step from the schedule
  double L_tilde = 0.0;      // fixed point of the log-closure recursion
  double C = 0.0;
  double B = 0.0;
};

// Derives the blocked-SGD schedule (step size, block length, per-block
// failure probability) from the profile at the initial value.  Throws
// std::runtime_error if the derived schedule fails its own feasibility
// inequalities or the block length is degenerate (< 4).
SgdParams build_sgd(const SelfBoundingProfile& profile,
                    const EffectiveConstants& consts, double eps,
                    double delta_conf, double scale = 1.0);

// One advance = one block of K0 oracle steps; intermediates are all K0 + 1
// iterates and every one is a candidate.  Decrease promise eta*K0*eps^2/4
// with failure probability p_block.
DecreaseProcedure sgd_procedure(const GradientOracle& oracle,
                                const SgdParams& params);

struct PerturbedGdParams {
  double c = 0.0;          // effective hyperparameter after scale
  double eps_tilde = 0.0;  // eps / L2
  double chi = 0.0;
  double eta = 0.0;
  double r = 0.0;          // perturbation radius
  double g_thres = 0.0;
  double f_thres = 0.0;
  std::int64_t t_thres = 0;
  double failure_prob = 0.0;
  double L1 = 0.0;
  double L2 = 0.0;
  int dim = 0;
};

// Schedule for perturbed gradient descent toward a second-order stationary
// point.  c is the base hyperparameter, capped at c_max; scale multiplies it
// for practical runs (the certified schedule is scale = 1).
PerturbedGdParams build_perturbed_gd(const EffectiveConstants& consts, int dim,
                                     double eps, double delta_conf,
                                     double c = 1e-4, double scale = 1.0,
                                     double c_max = 1e-4);

// Branching advance: a gradient-descent step while ||grad|| > g_thres;
// otherwise perturb within radius r, descend t_thres steps, and keep the
// endpoint only if it improved by at least f_thres.  The saddle branch costs
// t_thres + 1 gradient calls and 2 function evaluations.
DecreaseProcedure perturbed_gd_procedure(const Objective& objective,
                                         const PerturbedGdParams& params);

struct RestartedSgdParams {
  double p_conf = 0.0;
  double eps = 0.0;          // effective tolerance after the 1/L2 clamp
  double delta = 0.0;        // sqrt(L2 * eps)
  double delta2 = 0.0;       // 16 * delta
  double B = 0.0;            // escape radius
  double K0 = 0.0;           // block length; integer-valued but can exceed
                             // the int64 range at certified scales
  double K_o = 0.0;
  double eta = 0.0;
  double eta_tilde = 0.0;    // pre-log-correction step (diagnostic)
  double C_tilde1 = 0.0;
  double sigma_tilde = 0.0;  // injected-noise magnitude the oracle must match
  int dim = 0;
};

// Derives the restarted-SGD schedule by the fixed-point recipe: the step
// size, escape radius, and block length are mutually dependent through
// logarithmic factors and are iterated to stationarity, then the final step
// is re-verified against the schedule inequality by substitution.  Throws
// std::runtime_error if the iteration fails to converge or the verification
// fails.
RestartedSgdParams build_restarted_sgd(const RestartedNoiseConstants& noise,
                                       const EffectiveConstants& consts,
                                       int dim, double eps, double p_conf);

// Companion builder for practical runs: takes the step size directly and
// derives the dependent quantities (B, K0, K_o) from it, skipping the
// schedule inequality.
RestartedSgdParams build_restarted_sgd_with_eta(
    const RestartedNoiseConstants& noise, const EffectiveConstants& consts,
    int dim, double eps, double p_conf, double eta);

// One advance = SGD steps from u0 until the iterate leaves the ball of
// radius B around u0 (escape) or K0 steps elapse; the single candidate is
// the average of the pre-escape iterates.  Decrease promise B^2/(7 eta K0)
// with failure probability min{1, 7 p_conf / 4}.  The oracle must be an
// injected-noise oracle whose magnitude matches params.sigma_tilde.
DecreaseProcedure restarted_sgd_procedure(const GradientOracle& oracle,
                                          const RestartedSgdParams& params);

}  // namespace descent
