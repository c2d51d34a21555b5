#include "descent/optimizers.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace descent {

namespace {

constexpr std::int64_t kMaxCountable = std::int64_t{4} * 1000 * 1000 * 1000 *
                                       1000 * 1000 * 1000;  // 4e18

void require_positive_finite(double v, const char* what) {
  if (!std::isfinite(v) || v <= 0.0)
    throw std::invalid_argument(std::string(what) +
                                " must be positive and finite");
}

void require_open_unit(double v, const char* what) {
  if (!std::isfinite(v) || v <= 0.0 || v >= 1.0)
    throw std::invalid_argument(std::string(what) + " must lie in (0, 1)");
}

// Block length as an oracle-call count.  Certified schedules can produce
// block lengths beyond any runnable budget; saturate so the driver's budget
// precondition rejects them instead of overflowing.
std::int64_t saturated_count(double v) {
  if (v >= static_cast<double>(kMaxCountable)) return kMaxCountable;
  return static_cast<std::int64_t>(v);
}

}  // namespace

GdParams build_gd(const EffectiveConstants& consts, double scale) {
  require_positive_finite(scale, "build_gd: scale");
  require_positive_finite(consts.L1, "build_gd: L1");
  return GdParams{scale / consts.L1};
}

DecreaseProcedure gd_procedure(const Objective& objective,
                               const GdParams& params, double eps) {
  require_positive_finite(params.eta, "gd_procedure: eta");
  require_positive_finite(eps, "gd_procedure: eps");
  const Objective* obj = &objective;
  const double eta = params.eta;
  DecreaseProcedure proc;
  proc.name = "gd";
  proc.advance = [obj, eta](const Vec& u0, Rng&) {
    AdvanceResult adv;
    Vec g = obj->eval_gradient(u0);
    adv.next = u0;
    axpy(-eta, g, adv.next);
    adv.intermediates = {u0};
    adv.oracle_calls = 1;
    return adv;
  };
  proc.output_rule = [](const std::vector<Vec>& xs) { return xs; };
  proc.delta_fn = [eta, eps](const Vec&) { return 0.5 * eta * eps * eps; };
  proc.t_oracle_fn = [](const Vec&) { return std::int64_t{1}; };
  proc.failure_prob_fn = [](const Vec&) { return 0.0; };
  return proc;
}

AdaptiveGdParams build_adaptive_gd(const EffectiveConstants& consts,
                                   double scale) {
  require_positive_finite(scale, "build_adaptive_gd: scale");
  require_positive_finite(consts.L1_prime, "build_adaptive_gd: L1_prime");
  require_positive_finite(consts.rho0_at_F0_plus1,
                          "build_adaptive_gd: rho0(F0 + 1)");
  return AdaptiveGdParams{consts.L1_prime, consts.rho0_at_F0_plus1, scale};
}

DecreaseProcedure adaptive_gd_procedure(const Objective& objective,
                                        const AdaptiveGdParams& params,
                                        double eps) {
  require_positive_finite(params.L1_prime, "adaptive_gd_procedure: L1_prime");
  require_positive_finite(params.rho0_F0p1,
                          "adaptive_gd_procedure: rho0_F0p1");
  require_positive_finite(params.scale, "adaptive_gd_procedure: scale");
  require_positive_finite(eps, "adaptive_gd_procedure: eps");
  const Objective* obj = &objective;
  const double l1p = params.L1_prime;
  const double rho0 = params.rho0_F0p1;
  const double scale = params.scale;
  DecreaseProcedure proc;
  proc.name = "adaptive_gd";
  proc.advance = [obj, l1p, rho0, scale](const Vec& u0, Rng&) {
    AdvanceResult adv;
    Vec g = obj->eval_gradient(u0);
    const double gn = norm2(g);
    const double eta_t =
        gn > 0.0 ? std::min(1.0 / l1p, 1.0 / (rho0 * gn)) : 1.0 / l1p;
    adv.next = u0;
    axpy(-scale * eta_t, g, adv.next);
    adv.intermediates = {u0};
    adv.oracle_calls = 1;
    return adv;
  };
  proc.output_rule = [](const std::vector<Vec>& xs) { return xs; };
  const double delta =
      std::min(l1p / (2.0 * rho0 * rho0), eps * eps / (2.0 * l1p));
  proc.delta_fn = [delta](const Vec&) { return delta; };
  proc.t_oracle_fn = [](const Vec&) { return std::int64_t{1}; };
  proc.failure_prob_fn = [](const Vec&) { return 0.0; };
  return proc;
}

SgdParams build_sgd(const SelfBoundingProfile& profile,
                    const EffectiveConstants& consts, double eps,
                    double delta_conf, double scale) {
  require_open_unit(eps, "build_sgd: eps");
  require_open_unit(delta_conf, "build_sgd: delta_conf");
  require_positive_finite(scale, "build_sgd: scale");
  if (!profile.sigma)
    throw std::invalid_argument("build_sgd: profile has no noise envelope");

  const double L0 = consts.rho0_at_F0_plus1;
  const double L1 = consts.L1_prime;  // rho1 at F0 + 1
  const double sigma1 = (*profile.sigma)(consts.F0 + 1.0);
  if (!std::isfinite(sigma1) || sigma1 < 0.0)
    throw std::runtime_error("build_sgd: invalid noise level at F0 + 1");

  SgdParams p;
  p.eps = eps;
  p.delta_conf = delta_conf;
  p.B = sigma1 * sigma1 + 0.125 * sigma1 * L0;
  p.C = std::max(128.0 * p.B, 64.0 * (consts.F0 + 1.0) * (consts.F0 + 1.0));
  const double l_tilde_prime =
      std::max({8.0 * L1 * (L0 * L0 + sigma1 * sigma1), 2.0 * L0,
                4.0 * sigma1});

  // L_tilde must dominate both its polynomial floor and the eighth power of
  // its own logarithm; iterate the closure to a fixed point.
  const double root8 = std::pow(3.0 * std::sqrt(2.0), 8.0);
  const double floor_poly = l_tilde_prime * l_tilde_prime * p.C * p.C;
  double lt = std::max(floor_poly, root8);
  bool converged = false;
  for (int it = 0; it < 200; ++it) {
    const double next = std::max(
        {floor_poly, std::pow(3.0 * std::sqrt(2.0) * std::log(lt), 8.0),
         root8});
    if (std::abs(next - lt) <= 1e-13 * lt) {
      lt = next;
      converged = true;
      break;
    }
    lt = next;
  }
  if (!converged)
    throw std::runtime_error("build_sgd: L_tilde iteration did not converge");
  p.L_tilde = lt;

  const double log_ieps = std::log(1.0 / eps);
  const double log_idelta = std::log(1.0 / delta_conf);
  p.eta_tilde = eps * eps /
                (lt * std::pow(log_ieps, 6.0) * std::pow(log_idelta, 6.0));
  const double k0d = std::ceil(
      p.C / (eps * eps) * std::pow(std::log(1.0 / p.eta_tilde), 2.0) *
      std::pow(log_idelta, 2.0) * std::pow(log_ieps, 2.0));
  if (!(k0d >= 4.0))
    throw std::runtime_error("build_sgd: degenerate block length");
  if (k0d >= static_cast<double>(kMaxCountable))
    throw std::runtime_error("build_sgd: block length overflows");
  p.K0 = static_cast<std::int64_t>(k0d);

  p.eta = scale * p.eta_tilde / std::max(1.0, L0);
  p.p_block = delta_conf * p.eta * static_cast<double>(p.K0) * eps * eps /
              (4.0 * (consts.F0 + 1.0));
  if (!std::isfinite(p.p_block) || p.p_block <= 0.0 || p.p_block >= 1.0)
    throw std::runtime_error("build_sgd: per-block failure probability "
                             "outside (0, 1)");

  // The schedule's own feasibility inequalities, checked by substitution.
  const double cap1 = eps * eps / (8.0 * L1 * (L0 * L0 + sigma1 * sigma1));
  const double cap2 = 1.0 / (2.0 * static_cast<double>(p.K0) * L0);
  const double cap3 =
      1.0 / (4.0 * sigma1 *
             std::sqrt(static_cast<double>(p.K0) *
                       std::log(4.0 * static_cast<double>(p.K0) / p.p_block)));
  if (!(p.eta_tilde <= cap1 && p.eta_tilde <= cap2 &&
        (sigma1 == 0.0 || p.eta_tilde <= cap3)))
    throw std::runtime_error("build_sgd: infeasible step size");
  const double mass = static_cast<double>(p.K0) * eps * eps;
  const double need =
      128.0 * p.B *
      std::log(2.0 * std::log(static_cast<double>(p.K0)) / p.p_block);
  if (p.B > 0.0 && !(mass >= need))
    throw std::runtime_error("build_sgd: infeasible block mass");
  return p;
}

DecreaseProcedure sgd_procedure(const GradientOracle& oracle,
                                const SgdParams& params) {
  if (!oracle.objective)
    throw std::invalid_argument("sgd_procedure: oracle has no objective");
  require_positive_finite(params.eta, "sgd_procedure: eta");
  require_positive_finite(params.eps, "sgd_procedure: eps");
  if (params.K0 < 1)
    throw std::invalid_argument("sgd_procedure: K0 must be at least 1");
  if (!std::isfinite(params.p_block) || params.p_block < 0.0 ||
      params.p_block > 1.0)
    throw std::invalid_argument("sgd_procedure: p_block must lie in [0, 1]");

  const double eta = params.eta;
  const std::int64_t k0 = params.K0;
  DecreaseProcedure proc;
  proc.name = "sgd";
  proc.advance = [ora = GradientOracle(oracle), eta,
                  k0](const Vec& u0, Rng& rng) mutable {
    AdvanceResult adv;
    adv.intermediates.reserve(static_cast<std::size_t>(k0) + 1);
    adv.intermediates.push_back(u0);
    Vec x = u0;
    for (std::int64_t k = 0; k < k0; ++k) {
      Vec g = ora.query(x, rng);
      axpy(-eta, g, x);
      adv.intermediates.push_back(x);
    }
    adv.next = x;
    adv.oracle_calls = k0;
    return adv;
  };
  proc.output_rule = [](const std::vector<Vec>& xs) { return xs; };
  const double delta =
      eta * static_cast<double>(k0) * params.eps * params.eps / 4.0;
  proc.delta_fn = [delta](const Vec&) { return delta; };
  proc.t_oracle_fn = [k0](const Vec&) { return k0; };
  const double p_block = params.p_block;
  proc.failure_prob_fn = [p_block](const Vec&) { return p_block; };
  return proc;
}

PerturbedGdParams build_perturbed_gd(const EffectiveConstants& consts, int dim,
                                     double eps, double delta_conf, double c,
                                     double scale, double c_max) {
  if (dim < 1)
    throw std::invalid_argument("build_perturbed_gd: dim must be positive");
  require_open_unit(eps, "build_perturbed_gd: eps");
  require_open_unit(delta_conf, "build_perturbed_gd: delta_conf");
  require_positive_finite(c, "build_perturbed_gd: c");
  require_positive_finite(scale, "build_perturbed_gd: scale");
  require_positive_finite(c_max, "build_perturbed_gd: c_max");
  if (c > c_max)
    throw std::invalid_argument("build_perturbed_gd: c exceeds c_max");

  PerturbedGdParams p;
  p.L1 = consts.L1;
  p.L2 = consts.require_L2();
  p.dim = dim;
  p.c = c * scale;
  p.eps_tilde = eps / p.L2;
  const double log_arg = 2.0 * dim * p.L1 * p.L1 * consts.F0 /
                         (p.c * p.c * std::pow(p.eps_tilde, 2.5) * delta_conf);
  p.chi = 4.0 * std::max(std::log(log_arg), 5.0);
  p.eta = p.c / p.L1;
  const double chi2 = p.chi * p.chi;
  p.r = std::sqrt(p.c) * p.eps_tilde / (chi2 * p.L1);
  p.g_thres = std::sqrt(p.c) / chi2 * p.eps_tilde;
  p.f_thres = p.c / (chi2 * p.chi) *
              std::sqrt(p.eps_tilde * p.eps_tilde * p.eps_tilde / p.L2);
  const double sqrt_l2e = std::sqrt(p.L2 * p.eps_tilde);
  const double t_d = std::ceil(p.chi / (p.c * p.c) * p.L1 / sqrt_l2e);
  if (!std::isfinite(t_d) || t_d < 1.0)
    throw std::runtime_error("build_perturbed_gd: degenerate descent length");
  if (t_d >= static_cast<double>(kMaxCountable))
    throw std::runtime_error("build_perturbed_gd: descent length overflows");
  p.t_thres = static_cast<std::int64_t>(t_d);
  p.failure_prob =
      std::min(1.0, dim * p.L1 / sqrt_l2e * std::exp(-p.chi));
  if (!std::isfinite(p.r) || p.r <= 0.0 || !std::isfinite(p.f_thres) ||
      p.f_thres <= 0.0 || !std::isfinite(p.g_thres) || p.g_thres <= 0.0)
    throw std::runtime_error("build_perturbed_gd: degenerate thresholds");
  return p;
}

DecreaseProcedure perturbed_gd_procedure(const Objective& objective,
                                         const PerturbedGdParams& params) {
  if (params.dim != objective.dim)
    throw std::invalid_argument(
        "perturbed_gd_procedure: dimension mismatch with objective");
  require_positive_finite(params.eta, "perturbed_gd_procedure: eta");
  require_positive_finite(params.r, "perturbed_gd_procedure: r");
  require_positive_finite(params.g_thres, "perturbed_gd_procedure: g_thres");
  require_positive_finite(params.f_thres, "perturbed_gd_procedure: f_thres");
  if (params.t_thres < 1)
    throw std::invalid_argument(
        "perturbed_gd_procedure: t_thres must be at least 1");

  const Objective* obj = &objective;
  const PerturbedGdParams p = params;
  DecreaseProcedure proc;
  proc.name = "perturbed_gd";
  proc.advance = [obj, p](const Vec& u0, Rng& rng) {
    AdvanceResult adv;
    adv.intermediates = {u0};
    Vec g = obj->eval_gradient(u0);
    const double gn = norm2(g);
    if (gn > p.g_thres) {
      adv.next = u0;
      axpy(-p.eta, g, adv.next);
      adv.oracle_calls = 1;
      return adv;
    }
    const double f_anchor = obj->eval_value(u0);
    Vec w = u0;
    axpy(1.0, sample_uniform_ball(rng, obj->dim, p.r), w);
    for (std::int64_t t = 0; t < p.t_thres; ++t) {
      Vec gw = obj->eval_gradient(w);
      axpy(-p.eta, gw, w);
    }
    const double f_end = obj->eval_value(w);
    const bool escaped = f_end - f_anchor <= -p.f_thres;
    adv.next = escaped ? w : u0;
    adv.oracle_calls = p.t_thres + 1;
    adv.f_evals = 2;
    return adv;
  };
  proc.output_rule = [](const std::vector<Vec>& xs) { return xs; };
  proc.delta_fn = [obj, p](const Vec& u0) {
    Vec g = obj->eval_gradient(u0);
    const double gn = norm2(g);
    if (gn > p.g_thres) return 0.5 * p.eta * p.g_thres * p.g_thres;
    return p.f_thres;
  };
  proc.t_oracle_fn = [obj, p](const Vec& u0) {
    Vec g = obj->eval_gradient(u0);
    const double gn = norm2(g);
    return gn > p.g_thres ? std::int64_t{1} : p.t_thres + 1;
  };
  const double fail = p.failure_prob;
  proc.failure_prob_fn = [fail](const Vec&) { return fail; };
  return proc;
}

namespace {

struct RsgdDerived {
  double C1 = 0.0;
  double B = 0.0;
  double K0 = 0.0;
};

RsgdDerived rsgd_derived(double eta, double m, int dim, double delta,
                         double delta2, double L1, double L2, double sigma1,
                         double rho0_f0p1) {
  RsgdDerived d;
  d.C1 = 2.0 * m * std::log(24.0 * std::sqrt(double(dim)) / eta);
  d.B = std::min({delta / (L2 * d.C1), 1.0, sigma1 / L1, 1.0 / L1, 1.0 / L2,
                  1.0 / (2.0 * rho0_f0p1)});
  d.K0 = std::ceil(d.C1 / (eta * delta2));
  return d;
}

}  // namespace

RestartedSgdParams build_restarted_sgd(const RestartedNoiseConstants& noise,
                                       const EffectiveConstants& consts,
                                       int dim, double eps, double p_conf) {
  if (dim < 1)
    throw std::invalid_argument("build_restarted_sgd: dim must be positive");
  require_positive_finite(eps, "build_restarted_sgd: eps");
  require_open_unit(p_conf, "build_restarted_sgd: p_conf");

  const double L1 = noise.L1_rsgd;
  const double L2 = noise.L2_rsgd;
  const double sigma1 = noise.sigma1;
  const double rho0_f0p1 = consts.rho0_at_F0_plus1;

  RestartedSgdParams p;
  p.p_conf = p_conf;
  p.dim = dim;
  p.sigma_tilde = noise.sigma_tilde;
  p.eps = std::min(eps, 1.0 / L2);
  p.delta = std::sqrt(L2 * p.eps);
  p.delta2 = 16.0 * p.delta;
  const double m =
      std::floor(std::log(3.0 / p_conf) / std::log(1.0 / 0.8) + 1.0);
  const double noise_sq = std::max(sigma1 * sigma1, 1.0);

  // The step size, escape radius, and block length depend on each other only
  // through logarithms; iterate the whole recipe to a joint fixed point.
  double eta = 1e-2;
  bool converged = false;
  for (int outer = 0; outer < 200; ++outer) {
    RsgdDerived d = rsgd_derived(eta, m, dim, p.delta, p.delta2, L1, L2,
                                 sigma1, rho0_f0p1);
    p.eta_tilde = d.B * d.B * p.delta /
                  (4096.0 * noise_sq * std::log(48.0 / p_conf) *
                   std::log(1.0 / p_conf) * m);
    double e = p.eta_tilde / std::pow(std::log(1.0 / p.eta_tilde), 3.0);
    e = std::min({e, 1.0, 1.0 / (sigma1 * sigma1)});
    double k0 = std::ceil(d.C1 / (e * p.delta2));
    for (int inner = 0; inner < 100; ++inner) {
      const double rhs =
          d.B * d.B * p.delta /
          (512.0 * noise_sq * d.C1 * std::log(48.0 * k0 / p_conf)) /
          (3.0 * (1.0 + std::log(k0)));
      const double ne = std::min(e, rhs);
      const double nk = std::ceil(d.C1 / (ne * p.delta2));
      if (std::abs(ne - e) <= 1e-15 * ne && nk == k0) {
        e = ne;
        k0 = nk;
        break;
      }
      e = ne;
      k0 = nk;
    }
    if (std::abs(e - eta) <= 1e-12 * e) {
      eta = e;
      converged = true;
      break;
    }
    eta = e;
  }
  if (!converged)
    throw std::runtime_error(
        "build_restarted_sgd: schedule iteration did not converge");

  p.eta = eta;
  RsgdDerived d = rsgd_derived(eta, m, dim, p.delta, p.delta2, L1, L2, sigma1,
                               rho0_f0p1);
  p.C_tilde1 = d.C1;
  p.B = d.B;
  p.K0 = d.K0;
  p.K_o = 2.0 * std::log(24.0 * std::sqrt(double(dim)) / eta) /
          (eta * p.delta2);

  // Re-verify the converged step against the schedule inequality by direct
  // substitution; a failure here means the recipe is infeasible as stated.
  const double rhs =
      p.B * p.B * p.delta /
      (512.0 * noise_sq * p.C_tilde1 * std::log(48.0 * p.K0 / p_conf)) /
      (3.0 * (1.0 + std::log(p.K0)));
  if (!(p.eta <= rhs))
    throw std::runtime_error(
        "build_restarted_sgd: converged step fails the schedule inequality");
  return p;
}

RestartedSgdParams build_restarted_sgd_with_eta(
    const RestartedNoiseConstants& noise, const EffectiveConstants& consts,
    int dim, double eps, double p_conf, double eta) {
  if (dim < 1)
    throw std::invalid_argument(
        "build_restarted_sgd_with_eta: dim must be positive");
  require_positive_finite(eps, "build_restarted_sgd_with_eta: eps");
  require_open_unit(p_conf, "build_restarted_sgd_with_eta: p_conf");
  require_positive_finite(eta, "build_restarted_sgd_with_eta: eta");
  if (eta > 1.0)
    throw std::invalid_argument(
        "build_restarted_sgd_with_eta: eta must be at most 1");

  const double L1 = noise.L1_rsgd;
  const double L2 = noise.L2_rsgd;

  RestartedSgdParams p;
  p.p_conf = p_conf;
  p.dim = dim;
  p.sigma_tilde = noise.sigma_tilde;
  p.eps = std::min(eps, 1.0 / L2);
  p.delta = std::sqrt(L2 * p.eps);
  p.delta2 = 16.0 * p.delta;
  const double m =
      std::floor(std::log(3.0 / p_conf) / std::log(1.0 / 0.8) + 1.0);
  RsgdDerived d = rsgd_derived(eta, m, dim, p.delta, p.delta2, L1, L2,
                               noise.sigma1, consts.rho0_at_F0_plus1);
  p.eta = eta;
  p.eta_tilde = eta;
  p.C_tilde1 = d.C1;
  p.B = d.B;
  p.K0 = d.K0;
  p.K_o = 2.0 * std::log(24.0 * std::sqrt(double(dim)) / eta) /
          (eta * p.delta2);
  return p;
}

DecreaseProcedure restarted_sgd_procedure(const GradientOracle& oracle,
                                          const RestartedSgdParams& params) {
  if (oracle.kind != OracleKind::injected)
    throw std::invalid_argument(
        "restarted_sgd_procedure: expects an injected-noise oracle");
  if (!oracle.objective)
    throw std::invalid_argument(
        "restarted_sgd_procedure: oracle has no objective");
  if (std::abs(oracle.sigma_tilde - params.sigma_tilde) >
      1e-12 * std::max(1.0, std::abs(params.sigma_tilde)))
    throw std::invalid_argument(
        "restarted_sgd_procedure: oracle noise magnitude does not match the "
        "schedule");
  require_positive_finite(params.eta, "restarted_sgd_procedure: eta");
  require_positive_finite(params.B, "restarted_sgd_procedure: B");
  if (!(params.K0 >= 1.0))
    throw std::invalid_argument(
        "restarted_sgd_procedure: K0 must be at least 1");

  const double eta = params.eta;
  const double B = params.B;
  const std::int64_t kmax = saturated_count(params.K0);
  DecreaseProcedure proc;
  proc.name = "restarted_sgd";
  proc.advance = [ora = GradientOracle(oracle), eta, B,
                  kmax](const Vec& u0, Rng& rng) mutable {
    AdvanceResult adv;
    adv.intermediates.push_back(u0);
    Vec x = u0;
    for (std::int64_t k = 1; k <= kmax; ++k) {
      Vec g = ora.query(x, rng);
      ++adv.oracle_calls;
      axpy(-eta, g, x);
      if (norm2(sub(x, u0)) > B) break;
      if (k < kmax) adv.intermediates.push_back(x);
    }
    adv.next = x;
    return adv;
  };
  // Single candidate: the average of the kept (pre-escape) iterates.
  proc.output_rule = [](const std::vector<Vec>& xs) {
    Vec mean(xs.front().size(), 0.0);
    for (const Vec& x : xs) axpy(1.0 / double(xs.size()), x, mean);
    return std::vector<Vec>{mean};
  };
  const double delta_gain = B * B / (7.0 * eta * params.K0);
  proc.delta_fn = [delta_gain](const Vec&) { return delta_gain; };
  proc.t_oracle_fn = [kmax](const Vec&) { return kmax; };
  const double fail = std::min(1.0, 7.0 * params.p_conf / 4.0);
  proc.failure_prob_fn = [fail](const Vec&) { return fail; };
  return proc;
}

}  // namespace descent
