#pragma once
// Objective catalog: smooth test problems packaged with their self-bounding
// profiles and, where known, their global optima.
//
//   phase_retrieval  F(w) = w^T (I - w* w*^T) w + 3/4 (||w||^2 - 1)^2
//   matrix_pca       F(w) = 1/4 ||w w^T - M||_F^2, shifted so inf = 0
//   monomial_norm    F(w) = ||A w||^p for diagonal A and p >= 2
//   log_secant       F(x) = 1 - log(cos(1 + x)), one-dimensional
//   quadratic        F(w) = 1/2 sum_i d_i w_i^2
//
// phase_retrieval and matrix_pca are strict-saddle problems whose
// second-order stationary points are near-optima; log_secant has
// exponentially growing curvature (F'' = e^{2(F-1)} exactly), which is what
// the value-dependent profiles exist to capture.

#include <map>
#include <optional>
#include <string>

#include "descent/calculus.hpp"
#include "descent/numerics.hpp"

namespace descent {

struct Objective {
  std::string name;
  int dim = 0;
  std::function<double(const Vec&)> value;     // >= 0
  std::function<Vec(const Vec&)> gradient;
  std::optional<std::function<SymMat(const Vec&)>> hessian;
  SelfBoundingProfile profile;
  std::optional<std::vector<Vec>> optima;      // known global minimizers
  std::map<std::string, double> metadata;

  // Dimension-checked entry points; the bare callables skip the checks.
  double eval_value(const Vec& w) const;
  Vec eval_gradient(const Vec& w) const;
  SymMat eval_hessian(const Vec& w) const;  // throws if no Hessian is available
  bool has_hessian() const { return hessian.has_value(); }
};

// w_star must be a unit vector; optima are +-w_star.
Objective phase_retrieval(const Vec& w_star);

// M must be symmetric positive definite; optima are +-sqrt(lambda_1) v_1.
Objective matrix_pca(const SymMat& m);

// diag holds the positive diagonal of A; requires p >= 2.
Objective monomial_norm(double p, const Vec& diag);

Objective log_secant();

// Diagonal quadratic with positive curvatures.
Objective quadratic(const Vec& diag);

// Copy of obj with the noise envelope sigma installed on its profile.
Objective with_noise(Objective obj, ScalarFn sigma);

}  // namespace descent
