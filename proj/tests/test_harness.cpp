#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "descent/harness.hpp"
#include "descent/optimizers.hpp"

using namespace descent;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(bool(in));
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

SweepConfig mini_sweep_config() {
  SweepConfig cfg;
  cfg.objective.dim = 4;
  cfg.p_list = {2.0, 3.0};
  cfg.log_min_exp = -3.0;
  cfg.log_max_exp = 1.0;
  cfg.grid_count = 9;
  cfg.init_scales = {2.5, 5.0};
  cfg.inits_per_cell = 5;
  cfg.iterations = 60;
  cfg.base_seed = 17;
  return cfg;
}

}  // namespace

TEST_CASE("config parser handles comments, dotted keys, and whitespace") {
  const Config cfg = parse_config_text(
      "# leading comment\n"
      "objective.name = monomial   # trailing comment\n"
      "\n"
      "sweep.grid.count=30\n"
      "  sweep.init_scales = 2.5, 5.0 ,7.5\n"
      "base_seed = 42\n");
  CHECK(cfg.get_string("objective.name") == "monomial");
  CHECK(cfg.get_int("sweep.grid.count") == 30);
  CHECK(cfg.get_uint64_or("base_seed", 0) == 42);
  const std::vector<double> scales = cfg.get_list("sweep.init_scales");
  REQUIRE(scales.size() == 3);
  CHECK(scales[0] == 2.5);
  CHECK(scales[2] == 7.5);
  CHECK(cfg.get_double_or("missing.key", -1.5) == -1.5);
  CHECK_FALSE(cfg.has("missing.key"));
}

TEST_CASE("config parser rejects malformed input") {
  CHECK_THROWS_AS(parse_config_text("no equals sign here\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("= value\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("a=1\na=2\n"), ConfigError);
  const Config cfg = parse_config_text("x = abc\nlist = 1,,2\nempty =\n");
  CHECK_THROWS_AS(cfg.get_double("x"), ConfigError);
  CHECK_THROWS_AS(cfg.get_int("x"), ConfigError);
  CHECK_THROWS_AS(cfg.get_string("absent"), ConfigError);
  CHECK_THROWS_AS(cfg.get_list("empty"), ConfigError);
  CHECK(cfg.get_list("list").size() == 2);  // blank pieces are skipped
}

TEST_CASE("objective factory applies defaults and validates shapes") {
  ObjectiveSpec spec;
  spec.name = "monomial";
  spec.dim = 20;
  spec.p = 2.0;
  const Objective mono = make_objective(spec);
  CHECK(mono.dim == 20);
  CHECK(mono.metadata.at("p") == 2.0);
  // Default diagonal is the harmonic ramp (1/20, 1/19, ..., 1), so the first
  // entry is 1/20, the second 1/19, and the last is 1.
  Vec e1(20, 0.0);
  e1[0] = 1.0;
  CHECK(mono.eval_value(e1) == doctest::Approx(1.0 / 400.0).epsilon(1e-12));
  Vec e2(20, 0.0);
  e2[1] = 1.0;
  CHECK(mono.eval_value(e2) == doctest::Approx(1.0 / 361.0).epsilon(1e-12));

  spec.diag = {1.0, 2.0};
  CHECK_THROWS_AS(make_objective(spec), ConfigError);

  ObjectiveSpec pca;
  pca.name = "matrix_pca";
  pca.dim = 4;
  const Objective mp = make_objective(pca);
  CHECK(mp.metadata.at("lambda1") == doctest::Approx(2.0));

  ObjectiveSpec ls;
  ls.name = "log_secant";
  ls.dim = 3;
  CHECK_THROWS_AS(make_objective(ls), ConfigError);
  ls.dim = 1;
  CHECK(make_objective(ls).dim == 1);

  ObjectiveSpec bad;
  bad.name = "mystery";
  CHECK_THROWS_AS(make_objective(bad), ConfigError);

  ObjectiveSpec pr;
  pr.name = "phase_retrieval";
  pr.dim = 6;
  const Objective prob = make_objective(pr);
  Vec w(6, 0.0);
  CHECK(prob.eval_value(w) == doctest::Approx(0.75));
}

TEST_CASE("divergence detection follows the first-crossing rule") {
  CHECK(detect_divergence({1.0, 1.0, 1e6}, 100.0) == 2);
  CHECK(detect_divergence({1.0, 150.0, 1.0}, 100.0) == 1);
  // Two crossings: the first one wins.
  CHECK(detect_divergence({1.0, 200.0, 1e6}, 100.0) == 1);
  CHECK_FALSE(detect_divergence({2.0, 150.0, 1.0}, 100.0).has_value());
  CHECK_FALSE(detect_divergence({5.0, 4.0, 3.0, 2.0}, 100.0).has_value());
  CHECK_FALSE(detect_divergence({1.0}, 100.0).has_value());
  CHECK(detect_divergence({1.0, 100.0}, 100.0) == 1);  // >= is a crossing
  CHECK_THROWS_AS(detect_divergence({}, 100.0), std::invalid_argument);
}

TEST_CASE("sweep config round-trips through key=value text") {
  const Config cfg = parse_config_text(
      "objective.name = monomial\n"
      "objective.dim = 8\n"
      "sweep.p_list = 2, 4\n"
      "sweep.grid.count = 12\n"
      "sweep.inits_per_cell = 3\n"
      "sweep.iterations = 50\n"
      "sweep.algorithm = sgd\n"
      "sweep.noise.kind = ball\n"
      "sweep.noise.scale = 0.25\n"
      "sweep.threads = 2\n"
      "base_seed = 99\n");
  const SweepConfig sc = sweep_config_from(cfg);
  CHECK(sc.objective.dim == 8);
  CHECK(sc.p_list == std::vector<double>{2.0, 4.0});
  CHECK(sc.grid_count == 12);
  CHECK(sc.inits_per_cell == 3);
  CHECK(sc.algorithm == "sgd");
  CHECK(sc.noise_kind == "ball");
  CHECK(sc.noise_scale == 0.25);
  CHECK(sc.threads == 2);
  CHECK(sc.base_seed == 99);
  CHECK(sc.init_scales == std::vector<double>{2.5, 5.0, 7.5, 10.0});

  CHECK_THROWS_AS(sweep_config_from(parse_config_text("sweep.bogus = 1\n")),
                  ConfigError);
  CHECK_THROWS_AS(
      sweep_config_from(parse_config_text("objective.name = quadratic\n")),
      ConfigError);
  CHECK_THROWS_AS(
      sweep_config_from(parse_config_text("sweep.grid.count = 1\n")),
      ConfigError);
  CHECK_THROWS_AS(
      sweep_config_from(parse_config_text("sweep.algorithm = newton\n")),
      ConfigError);
}

TEST_CASE("run config validates algorithm, target, and init shape") {
  const Config cfg = parse_config_text(
      "objective.name = phase_retrieval\n"
      "objective.dim = 3\n"
      "run.algorithm = perturbed_gd\n"
      "run.target = sosp\n"
      "run.eps = 0.05\n"
      "run.scale = 1e5\n"
      "init.point = 0.001, 0, 0\n"
      "base_seed = 7\n");
  const RunConfig rc = run_config_from(cfg);
  CHECK(rc.algorithm == "perturbed_gd");
  CHECK(rc.target == "sosp");
  CHECK(rc.eps == 0.05);
  CHECK(rc.scale == 1e5);
  REQUIRE(rc.init_point.size() == 3);
  CHECK(rc.init_point[0] == 0.001);
  CHECK(rc.seed == 7);

  CHECK_THROWS_AS(run_config_from(parse_config_text("run.algorithm = lbfgs\n")),
                  ConfigError);
  CHECK_THROWS_AS(run_config_from(parse_config_text("run.target = third\n")),
                  ConfigError);
  CHECK_THROWS_AS(run_config_from(parse_config_text("run.eps = 0\n")),
                  ConfigError);
  CHECK_THROWS_AS(
      run_config_from(parse_config_text(
          "objective.dim = 2\ninit.point = 1, 2, 3\n")),
      ConfigError);
  CHECK_THROWS_AS(run_config_from(parse_config_text("surprise = 1\n")),
                  ConfigError);
}

TEST_CASE("mini sweep finds a threshold and fills every scanned cell") {
  const SweepConfig cfg = mini_sweep_config();
  const SweepResult res = run_sweep(cfg);
  REQUIRE(res.grid.size() == 9);
  CHECK(res.grid.front() == doctest::Approx(1e-3));
  CHECK(res.grid.back() == doctest::Approx(10.0));
  REQUIRE(res.thresholds.size() == 4);  // 2 exponents x 2 init scales

  for (const SweepThreshold& thr : res.thresholds) {
    INFO("p=", thr.p, " c=", thr.c);
    REQUIRE(thr.eta_index.has_value());  // eta = 10 certainly diverges
    // Every cell up to and including the threshold is recorded, none after.
    int count = 0;
    for (const SweepCell& cell : res.cells)
      if (cell.p == thr.p && cell.c == thr.c) {
        CHECK(cell.eta_index <= *thr.eta_index);
        CHECK(cell.n == cfg.inits_per_cell);
        ++count;
      }
    CHECK(count == *thr.eta_index + 1);
  }

  // Divergent cells carry the overflow flag once iterates leave the
  // representable range; with eta = 10 on a quadratic-scale objective the
  // last scanned cell always does.
  bool saw_overflow = false;
  for (const SweepCell& cell : res.cells) saw_overflow |= cell.overflowed;
  CHECK(saw_overflow);

  // Small steps leave the mean ratio finite and modest.
  const SweepCell& first = res.cells.front();
  CHECK(first.mean_ratio < 1.0);
  CHECK(first.std_ratio >= 0.0);
}

TEST_CASE("sweep results are identical across thread counts") {
  SweepConfig cfg = mini_sweep_config();
  cfg.threads = 1;
  const std::string csv1 = sweep_csv(run_sweep(cfg));
  cfg.threads = 4;
  const std::string csv4 = sweep_csv(run_sweep(cfg));
  CHECK(csv1 == csv4);
  cfg.threads = 1;
  const std::string again = sweep_csv(run_sweep(cfg));
  CHECK(csv1 == again);
}

TEST_CASE("sweep csv shape: header, cell rows, one threshold row per cell row "
          "group") {
  const SweepConfig cfg = mini_sweep_config();
  const SweepResult res = run_sweep(cfg);
  const std::string csv = sweep_csv(res);

  std::istringstream in(csv);
  std::string line;
  REQUIRE(std::getline(in, line));
  CHECK(line == "kind,p,c,eta_index,eta,mean_ratio,std_ratio,n,overflowed");
  int cell_rows = 0, threshold_rows = 0;
  while (std::getline(in, line)) {
    if (line.rfind("cell,", 0) == 0) {
      ++cell_rows;
      CHECK(threshold_rows == 0);  // cells precede thresholds
    } else if (line.rfind("threshold,", 0) == 0) {
      ++threshold_rows;
    } else {
      FAIL("unexpected row: ", line);
    }
  }
  CHECK(cell_rows == int(res.cells.size()));
  CHECK(threshold_rows == 4);
}

TEST_CASE("csv emission writes the same bytes as the in-memory string") {
  const SweepConfig cfg = mini_sweep_config();
  const SweepResult res = run_sweep(cfg);
  const std::string path = "/tmp/descent_test_sweep.csv";
  emit_csv(res, path);
  CHECK(slurp(path) == sweep_csv(res));
  std::remove(path.c_str());

  CHECK_THROWS_AS(emit_csv(res, "/nonexistent-dir/x.csv"),
                  std::runtime_error);
}

TEST_CASE("run record csv matches the trace serialization") {
  const Vec diag{1.0, 2.0};
  const Objective obj = quadratic(diag);
  const EffectiveConstants consts = effective_constants(obj.profile, 1.0);
  const DecreaseProcedure proc = gd_procedure(obj, build_gd(consts), 1e-3);
  Rng rng(3, 0);
  const RunRecord rec = run_driver(proc, obj, Vec{0.7, -0.4},
                                   make_fosp_target(obj, 1e-3), 10000, rng);
  const std::string path = "/tmp/descent_test_trace.csv";
  emit_csv(rec, path);
  CHECK(slurp(path) == trace_csv(rec));
  std::remove(path.c_str());
}

TEST_CASE("svg chart renders data rows and a no-data fallback") {
  const SweepConfig cfg = mini_sweep_config();
  const SweepResult res = run_sweep(cfg);
  const std::string svg = svg_chart(res, 2.0, 2.5);
  CHECK(svg.find("<svg") != std::string::npos);
  CHECK(svg.find("polyline") != std::string::npos);
  CHECK(svg.find("red") != std::string::npos);  // threshold rule is drawn

  const std::string empty = svg_chart(res, 99.0, 1.0);
  CHECK(empty.find("no data") != std::string::npos);
}

TEST_CASE("verification suite passes on the catalog") {
  const VerifyReport report = verify_suite(
      {"phase_retrieval", "matrix_pca", "monomial", "log_secant", "quadratic"},
      2026);
  for (const VerifyCheck& check : report.checks) {
    INFO(check.name, ": ", check.detail);
    CHECK(check.passed);
  }
  CHECK(report.all_passed());
  CHECK(report.checks.size() >= 30);
}

TEST_CASE("corrupted gradient fails the finite-difference check") {
  ObjectiveSpec spec;
  spec.name = "phase_retrieval";
  spec.dim = 5;
  Objective obj = make_objective(spec);
  obj.gradient = [inner = obj.gradient](const Vec& w) {
    Vec g = inner(w);
    g[0] += 0.01;
    return g;
  };
  const VerifyReport report = verify_objective(obj, 2026);
  bool fd_failed = false;
  for (const VerifyCheck& check : report.checks)
    if (check.name.find("gradient matches finite differences") !=
        std::string::npos)
      fd_failed = !check.passed;
  CHECK(fd_failed);
  CHECK_FALSE(report.all_passed());
}

TEST_CASE("verification verdicts are stable across seeds") {
  for (std::uint64_t seed : {1u, 77u, 31415u}) {
    const VerifyReport report = verify_suite({"phase_retrieval", "monomial"},
                                             seed);
    CHECK(report.all_passed());
  }
}
