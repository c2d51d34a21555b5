#pragma once
// Stationarity certification: gradient-norm and minimum-eigenvalue checks
// against first- and second-order targets, plus distance-to-optimum
// diagnostics for catalog problems.

#include <optional>

#include "descent/numerics.hpp"
#include "descent/problems.hpp"

namespace descent {

struct StationarityReport {
  double grad_norm = 0.0;
  std::optional<double> lambda_min;  // present iff the Hessian was checked
  bool is_fosp = false;
  std::optional<bool> is_sosp;  // present iff the Hessian was checked
  std::optional<double> dist_to_optimum;  // present iff optima are catalogued
};

// Generalized-threshold check.  First-order membership is
// ||grad F(w)|| <= grad_tol; when lambda_tol is set the analytic Hessian is
// required and second-order membership additionally needs
// lambda_min >= lambda_tol - 1e-10 (the eigensolver's residual slack, so the
// verdict does not flap at the boundary).
StationarityReport check_with_tols(const Objective& obj, const Vec& w,
                                   double grad_tol,
                                   std::optional<double> lambda_tol);

// eps-stationarity: FOSP means ||grad F(w)|| <= eps; SOSP additionally
// requires lambda_min(hess F(w)) >= -sqrt(eps).  want_sosp needs the
// objective's analytic Hessian and throws without one.
StationarityReport check(const Objective& obj, const Vec& w, double eps,
                         bool want_sosp);

// Smallest Euclidean distance from w to the objective's catalogued optima.
// Throws if the objective has none.
double optimum_distance(const Objective& obj, const Vec& w);

}  // namespace descent
