#pragma once
// Self-bounding regularity profiles and the constants derived from them.
//
// A profile describes how the derivatives of an objective are controlled by
// its value: rho1(F) bounds the Hessian operator norm, rho2(F) the
// third-order term, sigma(F) the gradient-noise radius, and rho3(g, F) the
// Hessian norm of a stochastic oracle draw.  From rho1 alone we get
//   theta(x) = integral over [0, x] of dv / rho1(v)
//   rho0(x)  = rho1(x) * sqrt(2 theta(x)),
// and rho0(F(w)) bounds the gradient norm.  Profiles with a closed form for
// rho0 can install it as rho0_override (it must dominate the generic form;
// construction spot-checks this).

#include <functional>
#include <optional>

#include "descent/numerics.hpp"

namespace descent {

using ScalarFn = std::function<double(double)>;
using BivariateFn = std::function<double(double, double)>;

struct SelfBoundingProfile {
  ScalarFn rho1;                          // positive, non-decreasing
  std::optional<ScalarFn> rho2;           // non-negative, non-decreasing
  std::optional<BivariateFn> rho3;        // non-decreasing in each argument
  std::optional<ScalarFn> sigma;          // non-negative, non-decreasing
  std::optional<ScalarFn> rho0_override;  // closed form dominating the generic rho0
};

// Validates shape conditions on a 64-point grid (monotonicity, positivity,
// override dominance) and returns the profile.  All catalog objectives build
// their profiles through this.  Throws std::invalid_argument on violations.
SelfBoundingProfile make_profile(SelfBoundingProfile p);

// (L0, L1)-smoothness embeds as rho1(x) = 3/2 L0 + 4 L1^2 x with the closed
// form rho0(x) = 2 sqrt(L0 x) + 5 L1^2 x^{3/2} / sqrt(L0).  Requires L0 > 0.
SelfBoundingProfile from_L0L1(double L0, double L1);

double theta(const SelfBoundingProfile& p, double x);
double rho0(const SelfBoundingProfile& p, double x);

struct EffectiveConstants {
  double F0 = 0;
  double L1 = 0;        // max{1, rho0(F0+1), rho0(F0) rho0(F0+1), rho1(F0+1)}
  double L1_prime = 0;  // rho1(F0+1)
  std::optional<double> L2;  // max{1, L1, rho2(F0+1)}; absent without rho2
  double rho0_at_F0 = 0;
  double rho0_at_F0_plus1 = 0;

  double require_L2() const;  // throws if the profile had no rho2
};

EffectiveConstants effective_constants(const SelfBoundingProfile& p, double F0);

struct RestartedNoiseConstants {
  double sigma_prime = 0;  // sigma(F0+1)
  double sigma_tilde = 0;  // 2 sigma(F0+1)
  double sigma1 = 0;       // max{sigma_prime + sigma_tilde, 1}
  double L1_rsgd = 0;      // max{1, rho1(F0+1), rho3(rho0(F0+1)+sigma_prime, F0+1)}
  double L2_rsgd = 0;      // max{1, rho2(F0+1), rho0(F0+1)^2 max{4, (sigma1+rho0(F0+1))^2}}
};

// Requires sigma, rho3, and rho2 on the profile; throws naming the missing
// piece otherwise.
RestartedNoiseConstants restarted_noise_constants(const SelfBoundingProfile& p,
                                                  double F0);

}  // namespace descent
