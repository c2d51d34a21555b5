// Command-line front end: `params` prints the derived schedule for a config,
// `run` executes one driver run and emits its trace, `sweep` executes the
// step-size sweep protocol, `verify` runs the certification suite.
// Exit codes: 0 success, 1 check failure, 2 configuration error.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "descent/calculus.hpp"
#include "descent/harness.hpp"
#include "descent/optimizers.hpp"

namespace {

using namespace descent;

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

using ParamList = std::vector<std::pair<std::string, std::string>>;

// Ownership bundle for one configured run: the objective and oracle live at
// stable addresses because the procedure closures hold pointers to them.
struct Setup {
  std::unique_ptr<Objective> objective;
  std::unique_ptr<GradientOracle> oracle;
  Vec w0;
  double f0 = 0.0;
  DecreaseProcedure proc;
  ParamList params;
};

void push_consts(ParamList& out, const EffectiveConstants& consts) {
  out.emplace_back("consts.F0", fmt17(consts.F0));
  out.emplace_back("consts.L1", fmt17(consts.L1));
  out.emplace_back("consts.L1_prime", fmt17(consts.L1_prime));
  if (consts.L2) out.emplace_back("consts.L2", fmt17(*consts.L2));
  out.emplace_back("consts.rho0_at_F0", fmt17(consts.rho0_at_F0));
  out.emplace_back("consts.rho0_at_F0_plus1",
                   fmt17(consts.rho0_at_F0_plus1));
}

Setup build_setup(const RunConfig& rc) {
  Setup s;
  const bool stochastic =
      rc.algorithm == "sgd" || rc.algorithm == "restarted_sgd";
  {
    Objective base = make_objective(rc.objective);
    if (rc.sigma > 0.0 || stochastic)
      base = with_noise(std::move(base),
                        [sig = rc.sigma](double) { return sig; });
    s.objective = std::make_unique<Objective>(std::move(base));
  }
  const Objective& obj = *s.objective;

  if (!rc.init_point.empty()) {
    s.w0 = rc.init_point;
  } else {
    Rng rng(rc.seed, derive_stream(0));
    s.w0 = sample_gaussian(rng, obj.dim, rc.init_scale);
  }
  s.f0 = obj.eval_value(s.w0);

  const EffectiveConstants consts = effective_constants(obj.profile, s.f0);
  s.params.emplace_back("objective.name", obj.name);
  s.params.emplace_back("objective.dim", std::to_string(obj.dim));
  for (const auto& [key, value] : obj.metadata)
    s.params.emplace_back("objective." + key, fmt17(value));
  s.params.emplace_back("init.f0", fmt17(s.f0));
  push_consts(s.params, consts);

  if (rc.algorithm == "gd") {
    GdParams p = build_gd(consts, rc.scale);
    if (rc.eta_override > 0.0) p.eta = rc.eta_override;
    s.params.emplace_back("gd.eta", fmt17(p.eta));
    s.proc = gd_procedure(obj, p, rc.eps);
  } else if (rc.algorithm == "adaptive_gd") {
    const AdaptiveGdParams p = build_adaptive_gd(consts, rc.scale);
    s.params.emplace_back("adaptive.L1_prime", fmt17(p.L1_prime));
    s.params.emplace_back("adaptive.rho0_F0p1", fmt17(p.rho0_F0p1));
    s.params.emplace_back("adaptive.scale", fmt17(p.scale));
    s.proc = adaptive_gd_procedure(obj, p, rc.eps);
  } else if (rc.algorithm == "sgd") {
    SgdParams p;
    if (rc.eta_override > 0.0 && rc.k0_override > 0) {
      p.eta = rc.eta_override;
      p.K0 = rc.k0_override;
      p.eps = rc.eps;
      p.delta_conf = rc.delta_conf;
      p.p_block = rc.delta_conf;
    } else {
      p = build_sgd(obj.profile, consts, rc.eps, rc.delta_conf, rc.scale);
    }
    s.params.emplace_back("sgd.eta", fmt17(p.eta));
    s.params.emplace_back("sgd.K0", std::to_string(p.K0));
    s.params.emplace_back("sgd.p_block", fmt17(p.p_block));
    s.params.emplace_back("sgd.eta_tilde", fmt17(p.eta_tilde));
    s.params.emplace_back("sgd.L_tilde", fmt17(p.L_tilde));
    s.params.emplace_back("sgd.C", fmt17(p.C));
    s.params.emplace_back("sgd.B", fmt17(p.B));
    s.oracle = std::make_unique<GradientOracle>(make_ball_noise_oracle(
        obj, [sig = rc.sigma](double) { return sig; }));
    s.proc = sgd_procedure(*s.oracle, p);
  } else if (rc.algorithm == "perturbed_gd") {
    const PerturbedGdParams p = build_perturbed_gd(
        consts, obj.dim, rc.eps, rc.delta_conf, rc.c, rc.scale, rc.c_max);
    s.params.emplace_back("pgd.c", fmt17(p.c));
    s.params.emplace_back("pgd.eps_tilde", fmt17(p.eps_tilde));
    s.params.emplace_back("pgd.chi", fmt17(p.chi));
    s.params.emplace_back("pgd.eta", fmt17(p.eta));
    s.params.emplace_back("pgd.r", fmt17(p.r));
    s.params.emplace_back("pgd.g_thres", fmt17(p.g_thres));
    s.params.emplace_back("pgd.f_thres", fmt17(p.f_thres));
    s.params.emplace_back("pgd.t_thres", std::to_string(p.t_thres));
    s.params.emplace_back("pgd.failure_prob", fmt17(p.failure_prob));
    s.proc = perturbed_gd_procedure(obj, p);
  } else if (rc.algorithm == "restarted_sgd") {
    const RestartedNoiseConstants noise =
        restarted_noise_constants(obj.profile, s.f0);
    s.params.emplace_back("noise.sigma_prime", fmt17(noise.sigma_prime));
    s.params.emplace_back("noise.sigma_tilde", fmt17(noise.sigma_tilde));
    s.params.emplace_back("noise.sigma1", fmt17(noise.sigma1));
    s.params.emplace_back("noise.L1", fmt17(noise.L1_rsgd));
    s.params.emplace_back("noise.L2", fmt17(noise.L2_rsgd));
    const RestartedSgdParams p =
        rc.eta_override > 0.0
            ? build_restarted_sgd_with_eta(noise, consts, obj.dim, rc.eps,
                                           rc.delta_conf, rc.eta_override)
            : build_restarted_sgd(noise, consts, obj.dim, rc.eps,
                                  rc.delta_conf);
    s.params.emplace_back("rsgd.eps", fmt17(p.eps));
    s.params.emplace_back("rsgd.delta", fmt17(p.delta));
    s.params.emplace_back("rsgd.delta2", fmt17(p.delta2));
    s.params.emplace_back("rsgd.B", fmt17(p.B));
    s.params.emplace_back("rsgd.K0", fmt17(p.K0));
    s.params.emplace_back("rsgd.K_o", fmt17(p.K_o));
    s.params.emplace_back("rsgd.eta", fmt17(p.eta));
    s.params.emplace_back("rsgd.eta_tilde", fmt17(p.eta_tilde));
    s.params.emplace_back("rsgd.C_tilde1", fmt17(p.C_tilde1));
    s.params.emplace_back("rsgd.sigma_tilde", fmt17(p.sigma_tilde));
    s.oracle = std::make_unique<GradientOracle>(make_injected_oracle(
        obj, [sig = rc.sigma](double) { return sig; }, p.sigma_tilde));
    s.proc = restarted_sgd_procedure(*s.oracle, p);
  } else {
    throw ConfigError("unknown algorithm '" + rc.algorithm + "'");
  }
  return s;
}

const char* reason_name(TerminatedReason r) {
  switch (r) {
    case TerminatedReason::hit:
      return "hit";
    case TerminatedReason::budget:
      return "budget";
    case TerminatedReason::decrease_violation:
      return "decrease_violation";
  }
  return "unknown";
}

int cmd_params(const RunConfig& rc) {
  const Setup s = build_setup(rc);
  for (const auto& [key, value] : s.params)
    std::cout << key << "=" << value << "\n";
  return 0;
}

int cmd_run(const RunConfig& rc, const std::string& out_dir) {
  Setup s = build_setup(rc);
  const Objective& obj = *s.objective;
  const StationaryTarget target = rc.target == "sosp"
                                      ? make_sosp_target(obj, rc.eps)
                                      : make_fosp_target(obj, rc.eps);
  Rng rng(rc.seed, derive_stream(1));
  const RunRecord rec =
      run_driver(s.proc, obj, s.w0, target, rc.oracle_budget, rng);

  std::filesystem::create_directories(out_dir);
  const std::string trace_path = out_dir + "/run_trace.csv";
  emit_csv(rec, trace_path);

  std::cout << "algorithm=" << rc.algorithm << "\n"
            << "objective=" << obj.name << "\n"
            << "f0=" << fmt17(s.f0) << "\n"
            << "steps=" << rec.function_values.size() - 1 << "\n"
            << "oracle_calls=" << rec.total_oracle_calls << "\n"
            << "f_evals=" << rec.total_f_evals << "\n"
            << "final_f=" << fmt17(rec.function_values.back()) << "\n"
            << "decrease_violations=" << rec.decrease_violations << "\n"
            << "terminated=" << reason_name(rec.terminated_reason) << "\n"
            << "hit=" << (rec.first_hit ? "1" : "0") << "\n"
            << "trace=" << trace_path << "\n";
  return rec.first_hit ? 0 : 1;
}

int cmd_sweep(const SweepConfig& sc, const std::string& out_dir) {
  const SweepResult res = run_sweep(sc);
  std::filesystem::create_directories(out_dir);
  const std::string csv_path = out_dir + "/sweep.csv";
  emit_csv(res, csv_path);
  std::cout << "cells=" << res.cells.size() << "\n"
            << "csv=" << csv_path << "\n";
  for (const SweepThreshold& thr : res.thresholds) {
    char name[96];
    std::snprintf(name, sizeof(name), "sweep_p%g_c%g.svg", thr.p, thr.c);
    const std::string svg_path = out_dir + "/" + name;
    std::ofstream svg(svg_path, std::ios::binary);
    if (!svg)
      throw std::runtime_error("cannot open '" + svg_path + "' for writing");
    svg << svg_chart(res, thr.p, thr.c);
    std::cout << "chart=" << svg_path << "\n";
    std::cout << "threshold p=" << thr.p << " c=" << thr.c << " ";
    if (thr.eta_index)
      std::cout << "eta_index=" << *thr.eta_index
                << " eta=" << fmt17(*thr.eta) << "\n";
    else
      std::cout << "eta_index=none\n";
  }
  return 0;
}

int cmd_verify(const std::vector<std::string>& names, std::uint64_t seed) {
  const VerifyReport report = verify_suite(names, seed);
  for (const VerifyCheck& check : report.checks)
    std::cout << (check.passed ? "PASS" : "FAIL") << "  " << check.name
              << (check.detail.empty() ? "" : "  (" + check.detail + ")")
              << "\n";
  std::cout << (report.all_passed() ? "all checks passed"
                                    : "some checks FAILED")
            << "\n";
  return report.all_passed() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"first-order methods under self-bounding regularity"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = ".";
  std::uint64_t seed_override = 0;

  CLI::App* params_cmd =
      app.add_subcommand("params", "print the derived parameter schedule");
  params_cmd->add_option("-c,--config", config_path, "key=value config file")
      ->required();
  CLI::Option* params_seed =
      params_cmd->add_option("--seed", seed_override, "override base_seed");

  CLI::App* run_cmd =
      app.add_subcommand("run", "single driver run, emits a trace CSV");
  run_cmd->add_option("-c,--config", config_path, "key=value config file")
      ->required();
  CLI::Option* run_seed =
      run_cmd->add_option("--seed", seed_override, "override base_seed");
  run_cmd->add_option("--out", out_dir, "output directory");

  CLI::App* sweep_cmd =
      app.add_subcommand("sweep", "step-size sweep, emits CSV and charts");
  sweep_cmd->add_option("-c,--config", config_path, "key=value config file")
      ->required();
  CLI::Option* sweep_seed =
      sweep_cmd->add_option("--seed", seed_override, "override base_seed");
  sweep_cmd->add_option("--out", out_dir, "output directory");

  CLI::App* verify_cmd =
      app.add_subcommand("verify", "certification suite for the catalog");
  std::vector<std::string> verify_names = {
      "phase_retrieval", "matrix_pca", "monomial", "log_secant", "quadratic"};
  verify_cmd->add_option("objectives", verify_names,
                         "objective names (default: the whole catalog)");
  std::uint64_t verify_seed = 2026;
  verify_cmd->add_option("--seed", verify_seed, "sampling seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;  // bad flags are configuration errors
  }

  try {
    if (params_cmd->parsed()) {
      RunConfig rc = run_config_from(parse_config_file(config_path));
      if (params_seed->count() > 0) rc.seed = seed_override;
      return cmd_params(rc);
    }
    if (run_cmd->parsed()) {
      RunConfig rc = run_config_from(parse_config_file(config_path));
      if (run_seed->count() > 0) rc.seed = seed_override;
      return cmd_run(rc, out_dir);
    }
    if (sweep_cmd->parsed()) {
      SweepConfig sc = sweep_config_from(parse_config_file(config_path));
      if (sweep_seed->count() > 0) sc.base_seed = seed_override;
      return cmd_sweep(sc, out_dir);
    }
    if (verify_cmd->parsed()) return cmd_verify(verify_names, verify_seed);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
