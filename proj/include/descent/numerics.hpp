#pragma once
// Dense symmetric eigensolver, adaptive quadrature, and a counter-based PRNG.
// These are the only floating-point building blocks the rest of the library
// uses; everything here is deterministic given its inputs.

#include <cstdint>
#include <functional>
#include <vector>

namespace descent {

using Vec = std::vector<double>;

// Small vector helpers.
double dot(const Vec& a, const Vec& b);
double norm2(const Vec& a);  // Euclidean norm
Vec sub(const Vec& a, const Vec& b);
Vec add(const Vec& a, const Vec& b);
Vec scaled(const Vec& a, double s);
void axpy(double alpha, const Vec& x, Vec& y);  // y += alpha * x
bool all_finite(const Vec& a);
void require_finite(const Vec& a, const char* where);

// Dense symmetric matrix, full row-major storage.  Callers fill both
// triangles; sym_eig_min rejects matrices whose two triangles disagree by
// more than 1e-12 relative to the largest entry.
struct SymMat {
  int n = 0;
  std::vector<double> a;

  SymMat() = default;
  explicit SymMat(int n_);
  double& at(int i, int j) { return a[static_cast<size_t>(i) * n + j]; }
  double at(int i, int j) const { return a[static_cast<size_t>(i) * n + j]; }
  double max_abs() const;
  double sym_defect() const;  // max |a_ij - a_ji|
};

// s * v v^T
SymMat outer(const Vec& v, double s);
void add_outer(SymMat& m, const Vec& v, double s);  // m += s * v v^T
void add_diag(SymMat& m, double s);                 // m += s * I
Vec matvec(const SymMat& m, const Vec& v);

struct EigPair {
  double value = 0;
  Vec vector;  // unit norm
};

// Smallest eigenvalue and a unit eigenvector, via cyclic Jacobi rotations.
// Residual guarantee: ||H v - lambda v|| <= 1e-9 (1 + ||H||_op).  n <= 512.
EigPair sym_eig_min(const SymMat& h);

// Integral of 1/f over [a, b] by adaptive Simpson with relative tolerance
// tol.  Throws std::domain_error if f is found non-positive or non-finite,
// std::runtime_error if the recursion exceeds depth 64 without converging.
double integrate_reciprocal(const std::function<double(double)>& f, double a,
                            double b, double tol = 1e-10);

// Counter-based PRNG: output k is a 64-bit mix of (seed, stream, k), so a
// (seed, stream) pair names one reproducible sample sequence independent of
// call sites, platforms, and thread schedules.  Streams for sweep cells are
// derived by hashing the cell coordinates with derive_stream.
struct Rng {
  uint64_t seed = 0;
  uint64_t stream = 0;
  uint64_t counter = 0;

  Rng() = default;
  Rng(uint64_t seed_, uint64_t stream_) : seed(seed_), stream(stream_) {}

  uint64_t next_u64();
  double uniform();       // [0, 1)
  double uniform_open();  // (0, 1]
  double normal();        // standard normal; consumes two uniforms per draw
};

uint64_t mix64(uint64_t z);  // splitmix64 finalizer
uint64_t derive_stream(uint64_t a, uint64_t b = 0, uint64_t c = 0,
                       uint64_t d = 0);

// Uniform sample from the closed ball of the given radius: Gaussian direction
// scaled by a U^(1/d) radial law; no rejection.  E||x|| = d/(d+1) * radius.
Vec sample_uniform_ball(Rng& rng, int dim, double radius);

Vec sample_gaussian(Rng& rng, int dim, double stddev);

}  // namespace descent
