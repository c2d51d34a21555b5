#include "descent/stationarity.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace descent {

namespace {

constexpr double kEigenSlack = 1e-10;

}  // namespace

StationarityReport check_with_tols(const Objective& obj, const Vec& w,
                                   double grad_tol,
                                   std::optional<double> lambda_tol) {
  if (!std::isfinite(grad_tol) || grad_tol < 0.0)
    throw std::invalid_argument("check_with_tols: bad grad_tol");
  if (lambda_tol && !std::isfinite(*lambda_tol))
    throw std::invalid_argument("check_with_tols: bad lambda_tol");

  StationarityReport r;
  r.grad_norm = norm2(obj.eval_gradient(w));
  r.is_fosp = r.grad_norm <= grad_tol;
  if (lambda_tol) {
    if (!obj.has_hessian())
      throw std::invalid_argument(
          "check_with_tols: second-order check needs an analytic Hessian (" +
          obj.name + " has none)");
    r.lambda_min = sym_eig_min(obj.eval_hessian(w)).value;
    r.is_sosp = r.is_fosp && *r.lambda_min >= *lambda_tol - kEigenSlack;
  }
  if (obj.optima && !obj.optima->empty()) r.dist_to_optimum = optimum_distance(obj, w);
  return r;
}

StationarityReport check(const Objective& obj, const Vec& w, double eps,
                         bool want_sosp) {
  if (!std::isfinite(eps) || eps <= 0.0)
    throw std::invalid_argument("check: eps must be positive");
  std::optional<double> lambda_tol;
  if (want_sosp) lambda_tol = -std::sqrt(eps);
  return check_with_tols(obj, w, eps, lambda_tol);
}

double optimum_distance(const Objective& obj, const Vec& w) {
  if (!obj.optima || obj.optima->empty())
    throw std::invalid_argument("optimum_distance: " + obj.name +
                                " has no catalogued optima");
  double best = std::numeric_limits<double>::infinity();
  for (const Vec& opt : *obj.optima) {
    const double d = norm2(sub(w, opt));
    if (d < best) best = d;
  }
  return best;
}

}  // namespace descent
