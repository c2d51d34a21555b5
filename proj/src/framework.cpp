#include "descent/framework.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace descent {

namespace {

CheckOutcome outcome_from_report(const StationarityReport& r, bool want_sosp) {
  CheckOutcome o;
  o.hit = want_sosp ? (r.is_sosp.has_value() && *r.is_sosp) : r.is_fosp;
  o.grad_norm = r.grad_norm;
  o.lambda_min = r.lambda_min;
  return o;
}

void require_positive_eps(double eps, const char* where) {
  if (!std::isfinite(eps) || eps <= 0.0)
    throw std::invalid_argument(std::string(where) +
                                ": eps must be positive and finite");
}

std::string fmt10(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

}  // namespace

StationaryTarget make_fosp_target(const Objective& objective, double eps) {
  require_positive_eps(eps, "make_fosp_target");
  StationaryTarget t;
  t.kind = TargetKind::fosp;
  t.epsilon = eps;
  t.checker = [&objective, eps](const Vec& w) {
    return outcome_from_report(check_with_tols(objective, w, eps, std::nullopt),
                               false);
  };
  return t;
}

StationaryTarget make_sosp_target(const Objective& objective, double eps) {
  require_positive_eps(eps, "make_sosp_target");
  if (!objective.has_hessian())
    throw std::invalid_argument(
        "make_sosp_target: " + objective.name +
        " has no analytic Hessian; second-order targets need one");
  const double lambda_tol = -std::sqrt(eps);
  StationaryTarget t;
  t.kind = TargetKind::sosp;
  t.epsilon = eps;
  t.checker = [&objective, eps, lambda_tol](const Vec& w) {
    return outcome_from_report(check_with_tols(objective, w, eps, lambda_tol),
                               true);
  };
  return t;
}

StationaryTarget make_second_order_target(const Objective& objective,
                                          double eps, double grad_tol,
                                          double lambda_tol) {
  require_positive_eps(eps, "make_second_order_target");
  if (!std::isfinite(grad_tol) || grad_tol < 0.0)
    throw std::invalid_argument("make_second_order_target: bad grad_tol");
  if (!std::isfinite(lambda_tol))
    throw std::invalid_argument("make_second_order_target: bad lambda_tol");
  if (!objective.has_hessian())
    throw std::invalid_argument(
        "make_second_order_target: " + objective.name +
        " has no analytic Hessian; second-order targets need one");
  StationaryTarget t;
  t.kind = TargetKind::sosp;
  t.epsilon = eps;
  t.checker = [&objective, grad_tol, lambda_tol](const Vec& w) {
    return outcome_from_report(
        check_with_tols(objective, w, grad_tol, lambda_tol), true);
  };
  return t;
}

RunRecord run_driver(const DecreaseProcedure& proc, const Objective& objective,
                     const Vec& w0, const StationaryTarget& target,
                     std::int64_t oracle_budget, Rng& rng,
                     const DriverOptions& options) {
  if (!proc.advance || !proc.output_rule || !proc.delta_fn ||
      !proc.t_oracle_fn || !proc.failure_prob_fn)
    throw std::invalid_argument("run_driver: procedure has unset callbacks");
  if (!target.checker)
    throw std::invalid_argument("run_driver: target has no checker");

  const double f0 = objective.eval_value(w0);
  if (!std::isfinite(f0))
    throw std::runtime_error("run_driver: F(w0) is not finite");
  {
    const double p = proc.failure_prob_fn(w0);
    if (!(p >= 0.0) || !(p <= 1.0))
      throw std::runtime_error("run_driver: failure probability outside [0,1]");
  }
  const std::int64_t t0 = proc.t_oracle_fn(w0);
  if (t0 < 1) throw std::runtime_error("run_driver: t_oracle(w0) < 1");
  if (oracle_budget < t0)
    throw std::invalid_argument(
        "run_driver: oracle budget below the first step's cost");

  RunRecord rec;
  Vec w = w0;
  double f_prev = f0;
  std::int64_t step = 0;
  while (true) {
    if (rec.total_oracle_calls >= oracle_budget) {
      rec.terminated_reason = TerminatedReason::budget;
      break;
    }
    const std::int64_t t_declared = proc.t_oracle_fn(w);
    if (t_declared < 1) throw std::runtime_error("run_driver: t_oracle < 1");
    const double delta = proc.delta_fn(w);
    if (!std::isfinite(delta) || delta <= 0.0)
      throw std::runtime_error("run_driver: delta_fn must be positive");

    AdvanceResult adv = proc.advance(w, rng);
    if (adv.intermediates.empty())
      throw std::runtime_error("run_driver: advance produced no intermediates");
    if (adv.oracle_calls < 0 || adv.oracle_calls > t_declared)
      throw std::runtime_error(
          "run_driver: advance exceeded its declared oracle budget");
    if (adv.f_evals < 0)
      throw std::runtime_error("run_driver: negative f_evals");
    rec.total_oracle_calls += adv.oracle_calls;
    rec.total_f_evals += adv.f_evals;

    const double f_next = objective.eval_value(adv.next);
    if (!std::isfinite(f_next))
      throw std::runtime_error("run_driver: non-finite function value");
    rec.function_values.push_back(f_next);

    const std::vector<Vec> candidates = proc.output_rule(adv.intermediates);
    bool step_hit = false;
    std::optional<CheckOutcome> first_outcome;
    for (const Vec& cand : candidates) {
      const std::size_t index = rec.candidates.size();
      rec.candidates.emplace_back(cand, step);
      if (step_hit) continue;  // certificate found; record but skip checking
      const CheckOutcome out = target.checker(cand);
      if (!first_outcome) first_outcome = out;
      if (out.hit) {
        step_hit = true;
        rec.first_hit = index;
        first_outcome = out;  // report the certified candidate's diagnostics
      }
    }

    const bool decreased = f_next < f_prev - delta;
    const bool violated = !step_hit && !decreased;
    if (violated) ++rec.decrease_violations;

    TraceRow row;
    row.step = step;
    row.oracle_calls_cum = rec.total_oracle_calls;
    row.f = f_next;
    if (first_outcome) {
      row.grad_norm = first_outcome->grad_norm;
      row.lambda_min = first_outcome->lambda_min;
    }
    row.candidate_hit = step_hit;
    rec.trace.push_back(row);

    if (step_hit) {
      rec.terminated_reason = TerminatedReason::hit;
      break;
    }
    if (violated && options.abort_on_decrease_violation) {
      rec.terminated_reason = TerminatedReason::decrease_violation;
      break;
    }
    w = adv.next;
    f_prev = f_next;
    ++step;
  }
  return rec;
}

double theoretical_call_bound(double f0, double delta_bar,
                              std::int64_t sup_toracle) {
  if (!std::isfinite(f0) || f0 < 0.0)
    throw std::invalid_argument("theoretical_call_bound: bad F0");
  if (!std::isfinite(delta_bar) || delta_bar <= 0.0)
    throw std::invalid_argument(
        "theoretical_call_bound: delta_bar must be positive");
  if (sup_toracle < 0)
    throw std::invalid_argument("theoretical_call_bound: bad sup_toracle");
  return f0 / delta_bar + static_cast<double>(sup_toracle);
}

std::string trace_csv(const RunRecord& record) {
  std::string out =
      "step,oracle_calls_cum,F,grad_norm,lambda_min_if_checked,candidate_flag\n";
  for (const TraceRow& r : record.trace) {
    out += std::to_string(r.step);
    out += ',';
    out += std::to_string(r.oracle_calls_cum);
    out += ',';
    out += fmt10(r.f);
    out += ',';
    out += fmt10(r.grad_norm);
    out += ',';
    if (r.lambda_min) out += fmt10(*r.lambda_min);
    out += ',';
    out += r.candidate_hit ? '1' : '0';
    out += '\n';
  }
  return out;
}

}  // namespace descent
