#include "descent/numerics.hpp"

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace descent {

double dot(const Vec& a, const Vec& b) {
  if (a.size() != b.size()) throw std::invalid_argument("dot: size mismatch");
  double s = 0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(const Vec& a) { return std::sqrt(dot(a, a)); }

Vec sub(const Vec& a, const Vec& b) {
  if (a.size() != b.size()) throw std::invalid_argument("sub: size mismatch");
  Vec r(a.size());
  for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

Vec add(const Vec& a, const Vec& b) {
  if (a.size() != b.size()) throw std::invalid_argument("add: size mismatch");
  Vec r(a.size());
  for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
  return r;
}

Vec scaled(const Vec& a, double s) {
  Vec r(a.size());
  for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] * s;
  return r;
}

void axpy(double alpha, const Vec& x, Vec& y) {
  if (x.size() != y.size()) throw std::invalid_argument("axpy: size mismatch");
  for (size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

bool all_finite(const Vec& a) {
  for (double v : a)
    if (!std::isfinite(v)) return false;
  return true;
}

void require_finite(const Vec& a, const char* where) {
  if (!all_finite(a))
    throw std::runtime_error(std::string(where) + ": non-finite entries");
}

SymMat::SymMat(int n_) : n(n_) {
  if (n_ <= 0) throw std::invalid_argument("SymMat: dimension must be positive");
  a.assign(static_cast<size_t>(n_) * n_, 0.0);
}

double SymMat::max_abs() const {
  double m = 0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

double SymMat::sym_defect() const {
  double d = 0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) d = std::max(d, std::abs(at(i, j) - at(j, i)));
  return d;
}

SymMat outer(const Vec& v, double s) {
  SymMat m(static_cast<int>(v.size()));
  add_outer(m, v, s);
  return m;
}

void add_outer(SymMat& m, const Vec& v, double s) {
  if (static_cast<int>(v.size()) != m.n)
    throw std::invalid_argument("add_outer: size mismatch");
  for (int i = 0; i < m.n; ++i)
    for (int j = 0; j < m.n; ++j) m.at(i, j) += s * v[i] * v[j];
}

void add_diag(SymMat& m, double s) {
  for (int i = 0; i < m.n; ++i) m.at(i, i) += s;
}

Vec matvec(const SymMat& m, const Vec& v) {
  if (static_cast<int>(v.size()) != m.n)
    throw std::invalid_argument("matvec: size mismatch");
  Vec r(m.n, 0.0);
  for (int i = 0; i < m.n; ++i) {
    double s = 0;
    for (int j = 0; j < m.n; ++j) s += m.at(i, j) * v[j];
    r[i] = s;
  }
  return r;
}

namespace {

double off_frobenius(const SymMat& m) {
  double s = 0;
  for (int i = 0; i < m.n; ++i)
    for (int j = 0; j < m.n; ++j)
      if (i != j) s += m.at(i, j) * m.at(i, j);
  return std::sqrt(s);
}

double frobenius(const SymMat& m) {
  double s = 0;
  for (double v : m.a) s += v * v;
  return std::sqrt(s);
}

}  // namespace

EigPair sym_eig_min(const SymMat& h) {
  if (h.n <= 0) throw std::invalid_argument("sym_eig_min: empty matrix");
  if (h.n > 512) throw std::invalid_argument("sym_eig_min: dimension exceeds 512");
  const double scale = std::max(1.0, h.max_abs());
  if (h.sym_defect() > 1e-12 * scale)
    throw std::invalid_argument("sym_eig_min: matrix is not symmetric");
  for (double v : h.a)
    if (!std::isfinite(v))
      throw std::invalid_argument("sym_eig_min: non-finite entries");

  const int n = h.n;
  SymMat a = h;
  // Symmetrize exactly so the rotations preserve symmetry bit-for-bit.
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      double v = 0.5 * (a.at(i, j) + a.at(j, i));
      a.at(i, j) = v;
      a.at(j, i) = v;
    }
  SymMat v(n);
  for (int i = 0; i < n; ++i) v.at(i, i) = 1.0;

  const double fro = std::max(frobenius(a), 1e-300);
  const int max_sweeps = 60;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    if (off_frobenius(a) <= 1e-14 * fro) break;
    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const double apq = a.at(p, q);
        if (std::abs(apq) <= 1e-18 * fro) continue;
        const double app = a.at(p, p);
        const double aqq = a.at(q, q);
        const double tau = (aqq - app) / (2.0 * apq);
        double t;
        if (tau >= 0)
          t = 1.0 / (tau + std::sqrt(1.0 + tau * tau));
        else
          t = -1.0 / (-tau + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        // A <- J^T A J with J acting on the (p, q) plane.
        for (int k = 0; k < n; ++k) {
          const double akp = a.at(k, p);
          const double akq = a.at(k, q);
          a.at(k, p) = c * akp - s * akq;
          a.at(k, q) = s * akp + c * akq;
        }
        for (int k = 0; k < n; ++k) {
          const double apk = a.at(p, k);
          const double aqk = a.at(q, k);
          a.at(p, k) = c * apk - s * aqk;
          a.at(q, k) = s * apk + c * aqk;
        }
        for (int k = 0; k < n; ++k) {
          const double vkp = v.at(k, p);
          const double vkq = v.at(k, q);
          v.at(k, p) = c * vkp - s * vkq;
          v.at(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }

  int arg = 0;
  for (int i = 1; i < n; ++i)
    if (a.at(i, i) < a.at(arg, arg)) arg = i;
  EigPair out;
  out.value = a.at(arg, arg);
  out.vector.resize(n);
  for (int i = 0; i < n; ++i) out.vector[i] = v.at(i, arg);
  const double nv = norm2(out.vector);
  for (double& x : out.vector) x /= nv;
  return out;
}

namespace {

struct QuadBudget {
  long evals = 0;
};

double eval_reciprocal(const std::function<double(double)>& f, double x) {
  const double fx = f(x);
  if (!std::isfinite(fx) || fx <= 0.0)
    throw std::domain_error("integrate_reciprocal: integrand must be positive and finite");
  return 1.0 / fx;
}

double adapt(const std::function<double(double)>& f, double a, double b,
             double ga, double gm, double gb, double whole, double eps,
             int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double glm = eval_reciprocal(f, lm);
  const double grm = eval_reciprocal(f, rm);
  const double left = (m - a) / 6.0 * (ga + 4.0 * glm + gm);
  const double right = (b - m) / 6.0 * (gm + 4.0 * grm + gb);
  const double delta = left + right - whole;
  if (std::abs(delta) <= 15.0 * eps) return left + right + delta / 15.0;
  if (depth >= 64)
    throw std::runtime_error("integrate_reciprocal: no convergence at depth 64");
  // eps is deliberately not halved: integrands with unbounded derivative at
  // an endpoint (x^{1/4}-style profiles) converge slower than the tolerance
  // split assumes; the built-in safety factor absorbs the accumulation.
  return adapt(f, a, m, ga, glm, gm, left, eps, depth + 1) +
         adapt(f, m, b, gm, grm, gb, right, eps, depth + 1);
}

}  // namespace

double integrate_reciprocal(const std::function<double(double)>& f, double a,
                            double b, double tol) {
  if (!std::isfinite(a) || !std::isfinite(b))
    throw std::invalid_argument("integrate_reciprocal: non-finite bounds");
  if (b < a) throw std::invalid_argument("integrate_reciprocal: b < a");
  if (!(tol > 0)) throw std::invalid_argument("integrate_reciprocal: tol <= 0");
  if (a == b) return 0.0;

  const double m = 0.5 * (a + b);
  const double ga = eval_reciprocal(f, a);
  const double gm = eval_reciprocal(f, m);
  const double gb = eval_reciprocal(f, b);
  // Two-panel estimate to anchor the absolute tolerance.
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double glm = eval_reciprocal(f, lm);
  const double grm = eval_reciprocal(f, rm);
  const double left = (m - a) / 6.0 * (ga + 4.0 * glm + gm);
  const double right = (b - m) / 6.0 * (gm + 4.0 * grm + gb);
  const double anchor = std::abs(left + right);
  // 0.05 safety factor: per-panel tolerances are not subdivided further, so
  // the headroom keeps the accumulated error of many accepted panels under
  // the requested relative tolerance.
  const double eps = 0.05 * tol * std::max(anchor, 1e-300);
  return adapt(f, a, m, ga, glm, gm, left, eps, 0) +
         adapt(f, m, b, gm, grm, gb, right, eps, 0);
}

uint64_t mix64(uint64_t z) {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ULL;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBULL;
  z ^= z >> 31;
  return z;
}

uint64_t Rng::next_u64() {
  ++counter;
  uint64_t z = seed + 0x9E3779B97F4A7C15ULL * counter;
  z ^= mix64(stream + 0x632BE59BD9B4E019ULL);
  return mix64(z);
}

double Rng::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::uniform_open() {
  return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
}

double Rng::normal() {
  const double u1 = uniform_open();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  return r * std::cos(6.283185307179586476925286766559 * u2);
}

uint64_t derive_stream(uint64_t a, uint64_t b, uint64_t c, uint64_t d) {
  uint64_t h = 0x9E3779B97F4A7C15ULL;
  h = mix64(h ^ mix64(a + 0x8CB92BA72F3D8DD7ULL));
  h = mix64(h ^ mix64(b + 0xABCC79579F2E6BDFULL));
  h = mix64(h ^ mix64(c + 0xC3A5C85C97CB3127ULL));
  h = mix64(h ^ mix64(d + 0xB492B66FBE98F273ULL));
  return h;
}

Vec sample_uniform_ball(Rng& rng, int dim, double radius) {
  if (dim <= 0) throw std::invalid_argument("sample_uniform_ball: dim <= 0");
  if (!(radius >= 0))
    throw std::invalid_argument("sample_uniform_ball: negative radius");
  Vec g(dim);
  for (int i = 0; i < dim; ++i) g[i] = rng.normal();
  const double u = rng.uniform_open();
  const double n = norm2(g);
  if (n == 0.0 || radius == 0.0) return Vec(dim, 0.0);
  const double r = radius * std::pow(u, 1.0 / dim);
  Vec x = scaled(g, r / n);
  // Rounding in the normalization can land a few ulps outside the ball; the
  // containment guarantee is load-bearing, so pull such points back in.
  for (int pass = 0; pass < 8; ++pass) {
    const double nx = norm2(x);
    if (nx <= radius) break;
    const double shrink = (radius / nx) * (pass == 0 ? 1.0 : 0.999999999999999);
    for (double& v : x) v *= shrink;
  }
  return x;
}

Vec sample_gaussian(Rng& rng, int dim, double stddev) {
  if (dim <= 0) throw std::invalid_argument("sample_gaussian: dim <= 0");
  Vec g(dim);
  for (int i = 0; i < dim; ++i) g[i] = stddev * rng.normal();
  return g;
}

}  // namespace descent
