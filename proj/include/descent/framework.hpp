#pragma once
// The decrease-procedure abstraction and its generic driver.  A decrease
// procedure advances the iterate and promises, with probability 1 - delta,
// either a function decrease of at least delta_fn(u0) or a candidate inside
// the target set; the driver iterates it, checks every candidate eagerly, and
// stops at the first certificate or at budget exhaustion.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "descent/numerics.hpp"
#include "descent/problems.hpp"
#include "descent/stationarity.hpp"

namespace descent {

struct AdvanceResult {
  Vec next;
  std::vector<Vec> intermediates;  // candidate sources; must be non-empty
  std::int64_t oracle_calls = 0;
  std::int64_t f_evals = 0;  // function evaluations, counted separately
};

struct DecreaseProcedure {
  std::string name;
  std::function<AdvanceResult(const Vec&, Rng&)> advance;
  // Maps a step's intermediates to the candidate points submitted to the
  // target checker.
  std::function<std::vector<Vec>(const std::vector<Vec>&)> output_rule;
  std::function<double(const Vec&)> delta_fn;  // promised decrease, > 0
  std::function<std::int64_t(const Vec&)> t_oracle_fn;
  std::function<double(const Vec&)> failure_prob_fn;  // in [0, 1]
};

enum class TargetKind { fosp, sosp };

struct CheckOutcome {
  bool hit = false;
  double grad_norm = 0.0;
  std::optional<double> lambda_min;
};

// Membership test for the target set, packaged with the diagnostics the
// driver records per candidate.
struct StationaryTarget {
  TargetKind kind = TargetKind::fosp;
  double epsilon = 0.0;
  std::function<CheckOutcome(const Vec&)> checker;
};

// ||grad F(w)|| <= eps.
StationaryTarget make_fosp_target(const Objective& objective, double eps);
// ||grad F(w)|| <= eps and lambda_min(hess F(w)) >= -sqrt(eps).  Refuses
// objectives without an analytic Hessian.
StationaryTarget make_sosp_target(const Objective& objective, double eps);
// Second-order target with explicit thresholds: ||grad F(w)|| <= grad_tol and
// lambda_min >= lambda_tol.  Used by algorithms whose certified set has
// tighter thresholds than the eps-SOSP definition.
StationaryTarget make_second_order_target(const Objective& objective,
                                          double eps, double grad_tol,
                                          double lambda_tol);

enum class TerminatedReason { hit, budget, decrease_violation };

struct TraceRow {
  std::int64_t step = 0;
  std::int64_t oracle_calls_cum = 0;
  double f = 0.0;
  double grad_norm = 0.0;  // of the first candidate checked this step
  std::optional<double> lambda_min;
  bool candidate_hit = false;
};

struct RunRecord {
  std::vector<std::pair<Vec, std::int64_t>> candidates;  // (point, step)
  std::optional<std::size_t> first_hit;  // index into candidates
  std::int64_t total_oracle_calls = 0;
  std::int64_t total_f_evals = 0;
  std::vector<double> function_values;  // F after each outer step
  TerminatedReason terminated_reason = TerminatedReason::budget;
  std::int64_t decrease_violations = 0;
  std::vector<TraceRow> trace;
};

struct DriverOptions {
  // A decrease violation normally only increments the counter (the promise is
  // probabilistic); aborting is for deterministic procedures where any
  // violation is a parameter bug.
  bool abort_on_decrease_violation = false;
};

// Iterates proc.advance from w0, submits every output_rule candidate to
// target.checker after each step, and stops at the first certified hit or
// when total oracle calls reach the budget (the final step may overshoot by
// its own cost).  F(w0) must be finite and the budget must cover at least the
// first step.  NaN function values abort with an exception.
RunRecord run_driver(const DecreaseProcedure& proc, const Objective& objective,
                     const Vec& w0, const StationaryTarget& target,
                     std::int64_t oracle_budget, Rng& rng,
                     const DriverOptions& options = {});

// F0 / delta_bar + sup_toracle: the oracle-call bound for a decrease
// procedure with per-call decrease rate delta_bar.
double theoretical_call_bound(double f0, double delta_bar,
                              std::int64_t sup_toracle);

// CSV serialization of the per-step trace (columns: step, oracle_calls_cum,
// F, grad_norm, lambda_min_if_checked, candidate_flag).
std::string trace_csv(const RunRecord& record);

}  // namespace descent
