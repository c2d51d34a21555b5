#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <limits>
#include <stdexcept>

#include "descent/oracles.hpp"
#include "descent/problems.hpp"
#include "doctest.h"
#include "test_util.hpp"

using namespace descent;

namespace {

Objective pr3() { return phase_retrieval({1.0, 0.0, 0.0}); }

}  // namespace

TEST_CASE("exact oracle returns the true gradient") {
  const Objective o = pr3();
  GradientOracle ex = make_exact_oracle(o);
  Rng rng(7, derive_stream(1));
  const Vec w = {0.3, -0.2, 0.9};
  const Vec g = ex.query(w, rng);
  const Vec grad = o.eval_gradient(w);
  REQUIRE(g.size() == grad.size());
  for (size_t i = 0; i < g.size(); ++i) CHECK(g[i] == grad[i]);
  CHECK(ex.call_count == 1);
  CHECK(rng.counter == 0);  // no randomness consumed

  // Zero noise envelope behaves identically to the exact oracle.
  GradientOracle z = make_ball_noise_oracle(o, [](double) { return 0.0; });
  const Vec gz = z.query(w, rng);
  for (size_t i = 0; i < gz.size(); ++i) CHECK(gz[i] == grad[i]);
}

TEST_CASE("ball noise respects the hard norm bound") {
  const Objective o = pr3();
  GradientOracle bn = make_ball_noise_oracle(
      o, [](double v) { return 0.05 + 0.1 * v; });
  Rng rng(11, derive_stream(2));
  const Vec points[] = {{0.3, -0.2, 0.9}, {1.5, 0.4, -0.1}, {0.0, 0.0, 2.0}};
  for (const Vec& w : points) {
    const Vec grad = o.eval_gradient(w);
    const double radius = 0.05 + 0.1 * o.eval_value(w);
    for (int k = 0; k < 2000; ++k) {
      const Vec g = bn.query(w, rng);
      CHECK(norm2(sub(g, grad)) <= radius);
    }
  }
  CHECK(bn.call_count == 6000);
}

TEST_CASE("ball noise is unbiased") {
  const Objective o = pr3();
  const double radius = 0.5;
  GradientOracle bn =
      make_ball_noise_oracle(o, [radius](double) { return radius; });
  Rng rng(23, derive_stream(3));
  const Vec w = {0.4, 0.1, -0.7};
  const Vec grad = o.eval_gradient(w);
  const int n = 100000;
  Vec mean(3, 0.0);
  for (int k = 0; k < n; ++k) {
    const Vec g = bn.query(w, rng);
    axpy(1.0 / n, sub(g, grad), mean);
  }
  // One ball coordinate has variance radius^2/(d+2).
  const double se = radius / std::sqrt((3.0 + 2.0) * n);
  for (int i = 0; i < 3; ++i) CHECK(std::abs(mean[i]) <= 4.0 * se);
  CHECK(norm2(mean) <= 3.0 * radius / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("injected oracle adds bounded extra noise") {
  const Objective o = pr3();
  const double st = 0.3;
  GradientOracle inj = make_injected_oracle(
      o, [](double v) { return 0.02 + 0.01 * v; }, st);
  Rng rng(31, derive_stream(4));
  const Vec w = {0.5, -0.4, 0.2};
  const Vec grad = o.eval_gradient(w);
  const double radius = 0.02 + 0.01 * o.eval_value(w);
  for (int k = 0; k < 3000; ++k) {
    const Vec g = inj.query(w, rng);
    CHECK(norm2(sub(g, grad)) <= radius + st);
  }

  // Purely injected noise: empty envelope, only the unit-ball term remains.
  GradientOracle pure = make_injected_oracle(o, ScalarFn{}, st);
  Vec mean(3, 0.0);
  const int n = 100000;
  for (int k = 0; k < n; ++k) {
    const Vec g = pure.query(w, rng);
    const Vec d = sub(g, grad);
    CHECK(norm2(d) <= st);
    axpy(1.0 / n, d, mean);
  }
  const double se = st / std::sqrt(5.0 * n);
  for (int i = 0; i < 3; ++i) CHECK(std::abs(mean[i]) <= 4.0 * se);
}

TEST_CASE("oracle determinism and value semantics") {
  const Objective o = pr3();
  GradientOracle a = make_injected_oracle(
      o, [](double v) { return 0.1 + 0.2 * v; }, 0.05);
  GradientOracle b = a;  // independent counter, same behavior
  Rng ra(99, derive_stream(5, 6)), rb(99, derive_stream(5, 6));
  const Vec w = {0.2, 0.8, -0.3};
  for (int k = 0; k < 50; ++k) {
    const Vec ga = a.query(w, ra);
    const Vec gb = b.query(w, rb);
    for (size_t i = 0; i < ga.size(); ++i) CHECK(ga[i] == gb[i]);
  }
  CHECK(a.call_count == 50);
  CHECK(b.call_count == 50);
  a.query(w, ra);
  CHECK(a.call_count == 51);
  CHECK(b.call_count == 50);
}

TEST_CASE("sampled hessian bound") {
  const Objective o = pr3();
  GradientOracle bn =
      make_ball_noise_oracle(o, [](double) { return 0.1; });
  // Phase retrieval's Hessian envelope at function value 1.
  CHECK(oracle_hessian_bound(bn, 2.5, 1.0) == doctest::Approx(19.0).epsilon(1e-12));
  GradientOracle ex = make_exact_oracle(o);
  CHECK(oracle_hessian_bound(ex, 2.5, 1.0) == oracle_hessian_bound(bn, 2.5, 1.0));

  double prev = 0.0;
  for (double f : {0.0, 0.5, 1.0, 4.0, 25.0}) {
    const double b = oracle_hessian_bound(bn, 1.0, f);
    CHECK(b >= prev);
    prev = b;
  }

  GradientOracle weird = ex;
  weird.kind = static_cast<OracleKind>(17);
  CHECK_THROWS_AS(oracle_hessian_bound(weird, 1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(oracle_hessian_bound(bn, -1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(oracle_hessian_bound(bn, 1.0, -1.0), std::invalid_argument);
}

TEST_CASE("oracle error paths") {
  const Objective o = pr3();
  GradientOracle bn = make_ball_noise_oracle(
      o, [](double) { return -0.5; });
  Rng rng(1, 1);
  CHECK_THROWS_AS(bn.query({0.1, 0.2, 0.3}, rng), std::domain_error);

  GradientOracle ex = make_exact_oracle(o);
  const double inf = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(ex.query({inf, 0.0, 0.0}, rng), std::runtime_error);

  CHECK_THROWS_AS(make_ball_noise_oracle(o, ScalarFn{}), std::invalid_argument);
  CHECK_THROWS_AS(make_injected_oracle(o, ScalarFn{}, -0.1),
                  std::invalid_argument);

  GradientOracle unset;
  CHECK_THROWS_AS(unset.query({0.0}, rng), std::invalid_argument);
}
