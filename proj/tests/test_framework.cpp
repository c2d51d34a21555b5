#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <limits>
#include <stdexcept>

#include "descent/calculus.hpp"
#include "descent/framework.hpp"
#include "descent/problems.hpp"
#include "doctest.h"

using namespace descent;

namespace {

// d = 1 objective with F(w) = w, kept non-negative by the procedures below.
Objective ramp() {
  Objective o;
  o.name = "ramp";
  o.dim = 1;
  o.value = [](const Vec& w) { return w[0]; };
  o.gradient = [](const Vec&) { return Vec{1.0}; };
  o.profile = make_profile({[](double) { return 1.0; }, std::nullopt,
                            std::nullopt, std::nullopt, std::nullopt});
  return o;
}

// Decrements F by one per step at a declared cost of t_oracle calls.
DecreaseProcedure unit_decrement(std::int64_t t_oracle) {
  DecreaseProcedure p;
  p.name = "unit-decrement";
  p.advance = [t_oracle](const Vec& u0, Rng&) {
    AdvanceResult r;
    r.next = {std::max(u0[0] - 1.0, 0.0)};
    r.intermediates = {u0};
    r.oracle_calls = t_oracle;
    return r;
  };
  p.output_rule = [](const std::vector<Vec>& xs) { return xs; };
  // The achieved decrease is exactly 1; promise a hair less so the strict
  // decrease comparison holds.
  p.delta_fn = [](const Vec&) { return 1.0 - 1e-9; };
  p.t_oracle_fn = [t_oracle](const Vec&) { return t_oracle; };
  p.failure_prob_fn = [](const Vec&) { return 0.0; };
  return p;
}

StationaryTarget sublevel_target(double threshold) {
  StationaryTarget t;
  t.kind = TargetKind::fosp;
  t.epsilon = threshold;
  t.checker = [threshold](const Vec& w) {
    CheckOutcome o;
    o.hit = w[0] <= threshold;
    o.grad_norm = w[0];
    return o;
  };
  return t;
}

DecreaseProcedure gd_procedure(const Objective& obj, double eta, double eps) {
  DecreaseProcedure p;
  p.name = "gd";
  p.advance = [&obj, eta](const Vec& u0, Rng&) {
    AdvanceResult r;
    r.next = sub(u0, scaled(obj.eval_gradient(u0), eta));
    r.intermediates = {u0};
    r.oracle_calls = 1;
    return r;
  };
  p.output_rule = [](const std::vector<Vec>& xs) { return xs; };
  p.delta_fn = [eta, eps](const Vec&) { return 0.5 * eta * eps * eps; };
  p.t_oracle_fn = [](const Vec&) { return std::int64_t{1}; };
  p.failure_prob_fn = [](const Vec&) { return 0.0; };
  return p;
}

}  // namespace

TEST_CASE("driver meets the oracle-call bound on a synthetic procedure") {
  const Objective o = ramp();
  Rng rng(5, 5);
  for (std::int64_t t : {std::int64_t{1}, std::int64_t{3}}) {
    const DecreaseProcedure p = unit_decrement(t);
    const StationaryTarget s = sublevel_target(0.5);
    RunRecord rec = run_driver(p, o, {10.0}, s, 1000, rng);
    CHECK(rec.terminated_reason == TerminatedReason::hit);
    const double bound = theoretical_call_bound(10.0, 1.0 / static_cast<double>(t), t);
    CHECK(static_cast<double>(rec.total_oracle_calls) <= bound);
    CHECK(rec.total_oracle_calls == 11 * t);  // hit exactly at F = 0
    REQUIRE(rec.first_hit.has_value());
    CHECK(rec.candidates[*rec.first_hit].second == 10);
    CHECK(rec.decrease_violations == 0);
    CHECK(rec.function_values.size() == rec.trace.size());
  }
}

TEST_CASE("a candidate already in the target set certifies at step zero") {
  const Objective o = quadratic({1.0, 1.0});
  DecreaseProcedure p = gd_procedure(o, 0.1, 1e-3);
  p.output_rule = [](const std::vector<Vec>&) {
    return std::vector<Vec>{{0.0, 0.0}};
  };
  const StationaryTarget s = make_fosp_target(o, 1e-3);
  Rng rng(1, 1);
  RunRecord rec = run_driver(p, o, {3.0, -1.0}, s, 100, rng);
  CHECK(rec.terminated_reason == TerminatedReason::hit);
  CHECK(rec.total_oracle_calls == 1);
  REQUIRE(rec.first_hit.has_value());
  CHECK(*rec.first_hit == 0);
  CHECK(rec.candidates[0].second == 0);
}

TEST_CASE("gradient descent as a decrease procedure reaches the target") {
  const Objective o = quadratic({1.0, 1.0});
  const Vec w0 = {3.0, 4.0};
  const double f0 = o.eval_value(w0);
  const EffectiveConstants ec = effective_constants(o.profile, f0);
  const double eps = 1e-3;
  const double eta = 1.0 / ec.L1;
  const DecreaseProcedure p = gd_procedure(o, eta, eps);
  const StationaryTarget s = make_fosp_target(o, eps);
  Rng rng(7, 2);
  RunRecord rec = run_driver(p, o, w0, s, 100000, rng);
  CHECK(rec.terminated_reason == TerminatedReason::hit);
  const double bound =
      theoretical_call_bound(f0, 0.5 * eta * eps * eps, 1);
  CHECK(static_cast<double>(rec.total_oracle_calls) <= bound);
  CHECK(rec.decrease_violations == 0);
  // One oracle call and one candidate per outer step, cumulatively recorded.
  for (std::size_t i = 0; i < rec.trace.size(); ++i) {
    CHECK(rec.trace[i].oracle_calls_cum ==
          static_cast<std::int64_t>(i) + 1);
    CHECK(rec.trace[i].step == static_cast<std::int64_t>(i));
  }
  CHECK(rec.candidates.size() == rec.trace.size());
  // The certified candidate really is stationary to tolerance.
  const Vec& hit = rec.candidates[*rec.first_hit].first;
  CHECK(norm2(o.eval_gradient(hit)) <= eps);
}

TEST_CASE("budget exhaustion is a normal termination") {
  const Objective o = quadratic({1.0, 1.0});
  const DecreaseProcedure p = gd_procedure(o, 0.01, 1e-6);
  const StationaryTarget s = make_fosp_target(o, 1e-6);
  Rng rng(3, 3);
  RunRecord rec = run_driver(p, o, {5.0, 5.0}, s, 10, rng);
  CHECK(rec.terminated_reason == TerminatedReason::budget);
  CHECK(rec.total_oracle_calls == 10);
  CHECK_FALSE(rec.first_hit.has_value());
}

TEST_CASE("decrease violations are counted, and optionally abort") {
  const Objective o = ramp();
  DecreaseProcedure p = unit_decrement(1);
  p.advance = [](const Vec& u0, Rng&) {
    AdvanceResult r;
    r.next = u0;  // no progress at all
    r.intermediates = {u0};
    r.oracle_calls = 1;
    return r;
  };
  const StationaryTarget s = sublevel_target(-1.0);  // unreachable
  Rng rng(9, 9);
  RunRecord rec = run_driver(p, o, {4.0}, s, 7, rng);
  CHECK(rec.terminated_reason == TerminatedReason::budget);
  CHECK(rec.decrease_violations == 7);

  DriverOptions strict;
  strict.abort_on_decrease_violation = true;
  RunRecord aborted = run_driver(p, o, {4.0}, s, 7, rng, strict);
  CHECK(aborted.terminated_reason == TerminatedReason::decrease_violation);
  CHECK(aborted.decrease_violations == 1);
  CHECK(aborted.trace.size() == 1);
}

TEST_CASE("driver validates procedure behavior") {
  const Objective o = ramp();
  const StationaryTarget s = sublevel_target(0.5);
  Rng rng(1, 4);

  DecreaseProcedure empty_out = unit_decrement(1);
  empty_out.advance = [](const Vec& u0, Rng&) {
    AdvanceResult r;
    r.next = {u0[0] - 1.0};
    r.oracle_calls = 1;
    return r;  // no intermediates
  };
  CHECK_THROWS_AS(run_driver(empty_out, o, {10.0}, s, 100, rng),
                  std::runtime_error);

  DecreaseProcedure overrun = unit_decrement(1);
  overrun.advance = [](const Vec& u0, Rng&) {
    AdvanceResult r;
    r.next = {u0[0] - 1.0};
    r.intermediates = {u0};
    r.oracle_calls = 5;  // above the declared t_oracle of 1
    return r;
  };
  CHECK_THROWS_AS(run_driver(overrun, o, {10.0}, s, 100, rng),
                  std::runtime_error);

  DecreaseProcedure zero_delta = unit_decrement(1);
  zero_delta.delta_fn = [](const Vec&) { return 0.0; };
  CHECK_THROWS_AS(run_driver(zero_delta, o, {10.0}, s, 100, rng),
                  std::runtime_error);

  DecreaseProcedure bad_prob = unit_decrement(1);
  bad_prob.failure_prob_fn = [](const Vec&) { return 2.0; };
  CHECK_THROWS_AS(run_driver(bad_prob, o, {10.0}, s, 100, rng),
                  std::runtime_error);

  CHECK_THROWS_AS(run_driver(unit_decrement(3), o, {10.0}, s, 2, rng),
                  std::invalid_argument);

  CHECK_THROWS_AS(run_driver(DecreaseProcedure{}, o, {10.0}, s, 100, rng),
                  std::invalid_argument);

  Objective nan_obj = ramp();
  nan_obj.value = [](const Vec&) {
    return std::numeric_limits<double>::quiet_NaN();
  };
  CHECK_THROWS_AS(run_driver(unit_decrement(1), nan_obj, {10.0}, s, 100, rng),
                  std::runtime_error);
}

TEST_CASE("stationary target factories") {
  const Objective o = phase_retrieval({1.0, 0.0});
  const Vec saddle = {0.0, 0.0};

  const StationaryTarget fosp = make_fosp_target(o, 0.01);
  CHECK(fosp.checker(saddle).hit);  // gradient vanishes at the saddle
  CHECK_FALSE(fosp.checker({0.5, 0.2}).hit);

  const StationaryTarget sosp = make_sosp_target(o, 0.01);
  const CheckOutcome at_saddle = sosp.checker(saddle);
  CHECK_FALSE(at_saddle.hit);  // lambda_min = -3 < -0.1
  REQUIRE(at_saddle.lambda_min.has_value());
  CHECK(*at_saddle.lambda_min == doctest::Approx(-3.0).epsilon(1e-9));
  CHECK(sosp.checker({1.0, 0.0}).hit);

  const StationaryTarget loose =
      make_second_order_target(o, 0.01, 1e-6, -4.0);
  CHECK(loose.checker(saddle).hit);
  const StationaryTarget tight =
      make_second_order_target(o, 0.01, 1e-6, -0.5);
  CHECK_FALSE(tight.checker(saddle).hit);

  Objective lin;
  lin.name = "linear";
  lin.dim = 1;
  lin.value = [](const Vec& w) { return std::abs(w[0]); };
  lin.gradient = [](const Vec&) { return Vec{1.0}; };
  lin.profile = make_profile({[](double) { return 1.0; }, std::nullopt,
                              std::nullopt, std::nullopt, std::nullopt});
  CHECK_THROWS_AS(make_sosp_target(lin, 0.01), std::invalid_argument);
  CHECK_THROWS_AS(make_fosp_target(o, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(make_second_order_target(o, 0.01, -1.0, -1.0),
                  std::invalid_argument);
}

TEST_CASE("call bound formula") {
  CHECK(theoretical_call_bound(10.0, 1.0, 1) == 11.0);
  CHECK(theoretical_call_bound(0.0, 3.7, 5) == 5.0);

  // Gradient-descent instantiation: delta_bar = eps^2/(2 L1) turns the bound
  // into 2 F0 L1 / eps^2 + 1.
  const double f0 = 2.0, l1 = 19.3, eps = 1e-2;
  const double got = theoretical_call_bound(f0, eps * eps / (2.0 * l1), 1);
  const double want = 2.0 * f0 * l1 / (eps * eps) + 1.0;
  CHECK(got == doctest::Approx(want).epsilon(1e-12));

  CHECK_THROWS_AS(theoretical_call_bound(10.0, 0.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(theoretical_call_bound(-1.0, 1.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(theoretical_call_bound(1.0, 1.0, -1), std::invalid_argument);
}

TEST_CASE("trace serializes to a stable csv") {
  const Objective o = ramp();
  const DecreaseProcedure p = unit_decrement(1);
  const StationaryTarget s = sublevel_target(0.5);
  Rng r1(11, 2), r2(11, 2);
  RunRecord a = run_driver(p, o, {3.0}, s, 100, r1);
  RunRecord b = run_driver(p, o, {3.0}, s, 100, r2);
  const std::string csv_a = trace_csv(a);
  const std::string csv_b = trace_csv(b);
  CHECK(csv_a == csv_b);
  CHECK(csv_a.rfind("step,oracle_calls_cum,F,grad_norm,lambda_min_if_checked,"
                    "candidate_flag\n", 0) == 0);
  // Four steps (F = 2, 1, 0, hit at candidate 0.0 on step 3).
  CHECK(a.trace.size() == 4);
  CHECK(csv_a.back() == '\n');
  CHECK(csv_a.substr(csv_a.size() - 2) == "1\n");  // final row flags the hit
}
