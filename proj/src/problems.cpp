#include "descent/problems.hpp"

#include <cmath>
#include <memory>
#include <stdexcept>

namespace descent {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

void check_dim(const Objective& o, const Vec& w, const char* what) {
  if (static_cast<int>(w.size()) != o.dim)
    throw std::invalid_argument(o.name + " " + what + ": dimension mismatch");
  require_finite(w, what);
}

}  // namespace

double Objective::eval_value(const Vec& w) const {
  check_dim(*this, w, "value");
  return value(w);
}

Vec Objective::eval_gradient(const Vec& w) const {
  check_dim(*this, w, "gradient");
  return gradient(w);
}

SymMat Objective::eval_hessian(const Vec& w) const {
  check_dim(*this, w, "hessian");
  if (!hessian)
    throw std::runtime_error(name + ": no Hessian available");
  return (*hessian)(w);
}

Objective phase_retrieval(const Vec& w_star) {
  const int d = static_cast<int>(w_star.size());
  if (d <= 0) throw std::invalid_argument("phase_retrieval: empty w_star");
  require_finite(w_star, "phase_retrieval w_star");
  if (std::abs(norm2(w_star) - 1.0) > 1e-12)
    throw std::invalid_argument("phase_retrieval: w_star must be a unit vector");
  auto ws = std::make_shared<Vec>(w_star);

  Objective o;
  o.name = "phase_retrieval";
  o.dim = d;
  o.value = [ws](const Vec& w) {
    const double n2 = dot(w, w);
    const double c = dot(w, *ws);
    const double v = n2 - c * c + 0.75 * (n2 - 1.0) * (n2 - 1.0);
    return std::max(v, 0.0);
  };
  o.gradient = [ws](const Vec& w) {
    const double n2 = dot(w, w);
    const double c = dot(w, *ws);
    // 2w - 2<w, w*> w* + 3(||w||^2 - 1) w
    Vec g = scaled(w, 2.0 + 3.0 * (n2 - 1.0));
    axpy(-2.0 * c, *ws, g);
    return g;
  };
  o.hessian = [ws, d](const Vec& w) {
    const double n2 = dot(w, w);
    SymMat h(d);
    add_diag(h, 2.0 + 3.0 * (n2 - 1.0));
    add_outer(h, *ws, -2.0);
    add_outer(h, w, 6.0);
    return h;
  };
  SelfBoundingProfile p;
  p.rho1 = [](double x) { return 9.0 * std::sqrt(x) + 10.0; };
  p.rho2 = [](double x) { return 18.0 * x + 37.0; };
  p.rho3 = [r1 = p.rho1](double, double fval) { return r1(fval); };
  o.profile = make_profile(std::move(p));
  o.optima = std::vector<Vec>{w_star, scaled(w_star, -1.0)};
  return o;
}

Objective matrix_pca(const SymMat& m) {
  if (m.n <= 0) throw std::invalid_argument("matrix_pca: empty matrix");
  if (m.sym_defect() > 1e-12 * std::max(1.0, m.max_abs()))
    throw std::invalid_argument("matrix_pca: M must be symmetric");
  const auto low = sym_eig_min(m);
  if (!(low.value > 0))
    throw std::invalid_argument("matrix_pca: M must be positive definite");
  SymMat neg = m;
  for (double& v : neg.a) v = -v;
  const auto top = sym_eig_min(neg);
  const double lambda1 = -top.value;  // ||M||_op
  const Vec v1 = top.vector;

  double frob2 = 0;
  for (double v : m.a) frob2 += v * v;

  const int d = m.n;
  auto mat = std::make_shared<SymMat>(m);
  const double l1sq = lambda1 * lambda1;

  Objective o;
  o.name = "matrix_pca";
  o.dim = d;
  // 1/4 ||w w^T - M||_F^2 - 1/4 (||M||_F^2 - lambda_1^2)
  //   = 1/4 (||w||^4 - 2 w^T M w + lambda_1^2).
  o.value = [mat, l1sq](const Vec& w) {
    const double n2 = dot(w, w);
    const double quad = dot(w, matvec(*mat, w));
    return std::max(0.25 * (n2 * n2 - 2.0 * quad + l1sq), 0.0);
  };
  o.gradient = [mat](const Vec& w) {
    // (w w^T - M) w = ||w||^2 w - M w
    Vec g = scaled(w, dot(w, w));
    axpy(-1.0, matvec(*mat, w), g);
    return g;
  };
  o.hessian = [mat, d](const Vec& w) {
    SymMat h(d);
    for (size_t i = 0; i < h.a.size(); ++i) h.a[i] = -mat->a[i];
    add_diag(h, dot(w, w));
    add_outer(h, w, 2.0);
    return h;
  };
  SelfBoundingProfile p;
  const double sq = std::sqrt(lambda1);
  p.rho1 = [lambda1, sq](double x) {
    const double t = 2.0 * std::pow(x, 0.25) + sq;
    return 3.0 * t * t + lambda1;
  };
  p.rho2 = [sq](double x) { return 8.0 * std::pow(x, 0.25) + 4.0 * sq; };
  p.rho3 = [r1 = p.rho1](double, double fval) { return r1(fval); };
  o.profile = make_profile(std::move(p));
  const Vec opt = scaled(v1, std::sqrt(lambda1));
  o.optima = std::vector<Vec>{opt, scaled(opt, -1.0)};
  o.metadata["lambda1"] = lambda1;
  o.metadata["shift"] = 0.25 * (frob2 - l1sq);
  return o;
}

Objective monomial_norm(double p, const Vec& diag) {
  if (!(p >= 2.0))
    throw std::invalid_argument("monomial_norm: p must be >= 2");
  const int d = static_cast<int>(diag.size());
  if (d <= 0) throw std::invalid_argument("monomial_norm: empty diagonal");
  double amax2 = 0, amin2 = HUGE_VAL;
  for (double a : diag) {
    if (!(a > 0) || !std::isfinite(a))
      throw std::invalid_argument("monomial_norm: diagonal entries must be positive");
    amax2 = std::max(amax2, a * a);
    amin2 = std::min(amin2, a * a);
  }
  auto a = std::make_shared<Vec>(diag);

  auto anorm = [a](const Vec& w) {
    double s = 0;
    for (size_t i = 0; i < w.size(); ++i) {
      const double t = (*a)[i] * w[i];
      s += t * t;
    }
    return std::sqrt(s);
  };

  Objective o;
  o.name = "monomial_norm";
  o.dim = d;
  o.value = [anorm, p](const Vec& w) { return std::pow(anorm(w), p); };
  o.gradient = [a, anorm, p](const Vec& w) {
    const double s = anorm(w);
    Vec g(w.size(), 0.0);
    if (s == 0.0) return g;  // p >= 2 makes the gradient vanish at the origin
    const double c = p * std::pow(s, p - 2.0);
    for (size_t i = 0; i < w.size(); ++i) g[i] = c * (*a)[i] * (*a)[i] * w[i];
    return g;
  };
  o.hessian = [a, anorm, p, d](const Vec& w) {
    SymMat h(d);
    const double s = anorm(w);
    if (s == 0.0) {
      if (p == 2.0)
        for (int i = 0; i < d; ++i) h.at(i, i) = 2.0 * (*a)[i] * (*a)[i];
      return h;  // zero limit for p > 2
    }
    const double c1 = p * std::pow(s, p - 2.0);
    for (int i = 0; i < d; ++i) h.at(i, i) = c1 * (*a)[i] * (*a)[i];
    if (p != 2.0) {
      Vec q(d);
      for (int i = 0; i < d; ++i) q[i] = (*a)[i] * (*a)[i] * w[i];
      add_outer(h, q, p * (p - 2.0) * std::pow(s, p - 4.0));
    }
    return h;
  };
  // Envelope for ||grad^2 F|| <= p(p-1) lambda_max(A^T A) ||A w||^{p-2} with
  // (p-2)/p value exponent; the +1 keeps rho1 positive at zero.
  const double cp = p * (p - 1.0) * amax2 * std::max(1.0, 1.0 / amin2);
  const double expo = (p - 2.0) / p;
  SelfBoundingProfile prof;
  prof.rho1 = [cp, expo](double x) { return cp * (1.0 + std::pow(x, expo)); };
  o.profile = make_profile(std::move(prof));
  o.optima = std::vector<Vec>{Vec(d, 0.0)};
  o.metadata["p"] = p;
  return o;
}

Objective log_secant() {
  // Maximal interval on which cos(1 + x) is positive, with a guard at both
  // ends; the minimum sits at x = -1 where F = 1 and F' = 0.
  const double lo = -1.0 - kPi / 2.0 + 1e-6;
  const double hi = kPi / 2.0 - 1.0 - 1e-6;
  auto in_domain = [lo, hi](const Vec& w) {
    if (!(w[0] > lo) || !(w[0] < hi))
      throw std::domain_error("log_secant: outside domain");
  };
  Objective o;
  o.name = "log_secant";
  o.dim = 1;
  o.value = [in_domain](const Vec& w) {
    in_domain(w);
    return 1.0 - std::log(std::cos(1.0 + w[0]));
  };
  o.gradient = [in_domain](const Vec& w) {
    in_domain(w);
    return Vec{std::tan(1.0 + w[0])};
  };
  o.hessian = [in_domain](const Vec& w) {
    in_domain(w);
    SymMat h(1);
    const double c = std::cos(1.0 + w[0]);
    h.at(0, 0) = 1.0 / (c * c);
    return h;
  };
  SelfBoundingProfile p;
  // F'' = sec^2(1+x) = e^{2(F-1)} exactly.
  p.rho1 = [](double t) { return std::exp(2.0 * (t - 1.0)); };
  p.rho2 = [](double t) { return 2.0 * std::exp(3.0 * (t - 1.0)); };
  p.rho3 = [r1 = p.rho1](double, double fval) { return r1(fval); };
  o.profile = make_profile(std::move(p));
  o.optima = std::vector<Vec>{Vec{-1.0}};
  return o;
}

Objective quadratic(const Vec& diag) {
  const int d = static_cast<int>(diag.size());
  if (d <= 0) throw std::invalid_argument("quadratic: empty diagonal");
  double dmax = 0;
  for (double v : diag) {
    if (!(v > 0) || !std::isfinite(v))
      throw std::invalid_argument("quadratic: curvatures must be positive");
    dmax = std::max(dmax, v);
  }
  auto a = std::make_shared<Vec>(diag);
  Objective o;
  o.name = "quadratic";
  o.dim = d;
  o.value = [a](const Vec& w) {
    double s = 0;
    for (size_t i = 0; i < w.size(); ++i) s += (*a)[i] * w[i] * w[i];
    return 0.5 * s;
  };
  o.gradient = [a](const Vec& w) {
    Vec g(w.size());
    for (size_t i = 0; i < w.size(); ++i) g[i] = (*a)[i] * w[i];
    return g;
  };
  o.hessian = [a, d](const Vec&) {
    SymMat h(d);
    for (int i = 0; i < d; ++i) h.at(i, i) = (*a)[i];
    return h;
  };
  SelfBoundingProfile p;
  p.rho1 = [dmax](double) { return dmax; };
  p.rho2 = [](double) { return 0.0; };
  p.rho3 = [dmax](double, double) { return dmax; };
  o.profile = make_profile(std::move(p));
  o.optima = std::vector<Vec>{Vec(d, 0.0)};
  return o;
}

Objective with_noise(Objective obj, ScalarFn sigma) {
  SelfBoundingProfile p = obj.profile;
  p.sigma = std::move(sigma);
  obj.profile = make_profile(std::move(p));
  return obj;
}

}  // namespace descent
