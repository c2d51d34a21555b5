#include "descent/calculus.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace descent {

namespace {

// 0 plus 63 log-spaced points in [1e-6, 1e2]: wide enough to catch shape
// mistakes, small enough that exponential profiles stay finite.
std::vector<double> validation_grid() {
  std::vector<double> g;
  g.push_back(0.0);
  const double lo = -6.0, hi = 2.0;
  for (int i = 0; i < 63; ++i)
    g.push_back(std::pow(10.0, lo + (hi - lo) * i / 62.0));
  return g;
}

void check_monotone(const ScalarFn& f, const std::vector<double>& grid,
                    const char* name, bool require_positive) {
  double prev = -HUGE_VAL;
  for (double x : grid) {
    const double v = f(x);
    if (!std::isfinite(v))
      throw std::invalid_argument(std::string(name) + ": non-finite value on grid");
    if (v < 0)
      throw std::invalid_argument(std::string(name) + ": negative value on grid");
    if (require_positive && x > 0 && v <= 0)
      throw std::invalid_argument(std::string(name) + ": must be positive");
    if (v < prev * (1.0 - 1e-9) - 1e-12)
      throw std::invalid_argument(std::string(name) + ": not non-decreasing on grid");
    prev = std::max(prev, v);
  }
}

}  // namespace

SelfBoundingProfile make_profile(SelfBoundingProfile p) {
  if (!p.rho1) throw std::invalid_argument("profile: rho1 is required");
  const auto grid = validation_grid();
  check_monotone(p.rho1, grid, "rho1", /*require_positive=*/true);
  if (p.rho1(0.0) <= 0.0 && !p.rho0_override)
    throw std::invalid_argument(
        "profile: rho1(0) must be positive unless rho0_override is supplied");
  if (p.rho2) check_monotone(*p.rho2, grid, "rho2", false);
  if (p.sigma) check_monotone(*p.sigma, grid, "sigma", false);
  if (p.rho0_override) {
    check_monotone(*p.rho0_override, grid, "rho0_override", false);
    if (p.rho1(0.0) > 0.0) {
      // Spot-check dominance over the generic rho1 sqrt(2 theta) form.
      for (double x : {1e-4, 1e-2, 1.0, 10.0, 100.0}) {
        const double generic =
            p.rho1(x) * std::sqrt(2.0 * integrate_reciprocal(p.rho1, 0.0, x, 1e-8));
        if ((*p.rho0_override)(x) < generic * (1.0 - 1e-6))
          throw std::invalid_argument(
              "profile: rho0_override does not dominate rho1 sqrt(2 theta)");
      }
    }
  }
  return p;
}

SelfBoundingProfile from_L0L1(double L0, double L1) {
  if (!(L0 > 0) || !std::isfinite(L0))
    throw std::invalid_argument("from_L0L1: L0 must be positive and finite");
  if (!(L1 >= 0) || !std::isfinite(L1))
    throw std::invalid_argument("from_L0L1: L1 must be non-negative and finite");
  SelfBoundingProfile p;
  p.rho1 = [L0, L1](double x) { return 1.5 * L0 + 4.0 * L1 * L1 * x; };
  p.rho0_override = [L0, L1](double x) {
    return 2.0 * std::sqrt(L0 * x) + 5.0 * L1 * L1 * std::pow(x, 1.5) / std::sqrt(L0);
  };
  return make_profile(std::move(p));
}

double theta(const SelfBoundingProfile& p, double x) {
  if (!(x >= 0)) throw std::invalid_argument("theta: x must be non-negative");
  return integrate_reciprocal(p.rho1, 0.0, x);
}

double rho0(const SelfBoundingProfile& p, double x) {
  if (!(x >= 0)) throw std::invalid_argument("rho0: x must be non-negative");
  if (p.rho0_override) return (*p.rho0_override)(x);
  return p.rho1(x) * std::sqrt(2.0 * theta(p, x));
}

double EffectiveConstants::require_L2() const {
  if (!L2)
    throw std::runtime_error(
        "effective constants: L2 requested but the profile has no rho2");
  return *L2;
}

EffectiveConstants effective_constants(const SelfBoundingProfile& p, double F0) {
  if (!(F0 >= 0) || !std::isfinite(F0))
    throw std::invalid_argument("effective_constants: F0 must be >= 0 and finite");
  EffectiveConstants c;
  c.F0 = F0;
  c.rho0_at_F0 = rho0(p, F0);
  c.rho0_at_F0_plus1 = rho0(p, F0 + 1.0);
  c.L1_prime = p.rho1(F0 + 1.0);
  c.L1 = std::max({1.0, c.rho0_at_F0_plus1, c.rho0_at_F0 * c.rho0_at_F0_plus1,
                   c.L1_prime});
  if (p.rho2) c.L2 = std::max({1.0, c.L1, (*p.rho2)(F0 + 1.0)});
  if (c.rho0_at_F0 > c.rho0_at_F0_plus1 * (1.0 + 1e-9))
    throw std::runtime_error("effective_constants: rho0 not monotone");
  return c;
}

RestartedNoiseConstants restarted_noise_constants(const SelfBoundingProfile& p,
                                                  double F0) {
  if (!(F0 >= 0) || !std::isfinite(F0))
    throw std::invalid_argument("restarted_noise_constants: F0 must be >= 0");
  if (!p.sigma)
    throw std::runtime_error("restarted_noise_constants: profile has no sigma");
  if (!p.rho3)
    throw std::runtime_error("restarted_noise_constants: profile has no rho3");
  if (!p.rho2)
    throw std::runtime_error("restarted_noise_constants: profile has no rho2");
  RestartedNoiseConstants c;
  const double r0 = rho0(p, F0 + 1.0);
  c.sigma_prime = (*p.sigma)(F0 + 1.0);
  c.sigma_tilde = 2.0 * c.sigma_prime;
  c.sigma1 = std::max(c.sigma_prime + c.sigma_tilde, 1.0);
  c.L1_rsgd = std::max({1.0, p.rho1(F0 + 1.0), (*p.rho3)(r0 + c.sigma_prime, F0 + 1.0)});
  const double amp = std::max(4.0, (c.sigma1 + r0) * (c.sigma1 + r0));
  c.L2_rsgd = std::max({1.0, (*p.rho2)(F0 + 1.0), r0 * r0 * amp});
  return c;
}

}  // namespace descent
