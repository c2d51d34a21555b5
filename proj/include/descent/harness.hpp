#pragma once
// Experiment harness: key=value configuration, the step-size sweep protocol
// with divergence-threshold detection, CSV/SVG emission, and the
// certification suite that drives the finite-difference and envelope checks.

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "descent/framework.hpp"
#include "descent/problems.hpp"

namespace descent {

// Raised for malformed configuration input; the CLI maps it to exit code 2.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Flat key=value store with '#' comments and dotted keys for namespacing.
struct Config {
  std::map<std::string, std::string> kv;

  bool has(const std::string& key) const;
  std::string get_string(const std::string& key) const;
  std::string get_string_or(const std::string& key,
                            const std::string& fallback) const;
  double get_double(const std::string& key) const;
  double get_double_or(const std::string& key, double fallback) const;
  std::int64_t get_int(const std::string& key) const;
  std::int64_t get_int_or(const std::string& key, std::int64_t fallback) const;
  std::uint64_t get_uint64_or(const std::string& key,
                              std::uint64_t fallback) const;
  // Comma-separated list of reals.
  std::vector<double> get_list(const std::string& key) const;
};

Config parse_config_text(const std::string& text);
Config parse_config_file(const std::string& path);

// Catalog objective selection: name plus the parameters the catalog factories
// need.  Empty diag lists select per-objective defaults.
struct ObjectiveSpec {
  std::string name = "monomial";
  int dim = 20;
  double p = 2.0;            // monomial exponent
  std::vector<double> diag;  // monomial/quadratic diagonal; pca spectrum
};

Objective make_objective(const ObjectiveSpec& spec);

struct SweepConfig {
  ObjectiveSpec objective;            // family; the exponent comes from p_list
  std::vector<double> p_list = {2.0, 3.0, 4.0, 5.0, 6.0};
  double log_min_exp = -8.0;
  double log_max_exp = 1.0;
  int grid_count = 30;
  std::vector<double> init_scales = {2.5, 5.0, 7.5, 10.0};
  int inits_per_cell = 100;
  int iterations = 1000;
  std::string algorithm = "gd";       // gd | sgd
  std::string noise_kind = "gaussian";  // sgd only: gaussian | ball
  double noise_scale = 0.1;           // per-coordinate std / ball radius
  double divergence_factor = 100.0;
  std::uint64_t base_seed = 0;
  int threads = 1;
};

struct SweepCell {
  double p = 0.0;
  double c = 0.0;
  int eta_index = 0;
  double eta = 0.0;
  double mean_ratio = 0.0;
  double std_ratio = 0.0;
  int n = 0;
  bool overflowed = false;  // some trajectory hit the non-finite sentinel
};

struct SweepThreshold {
  double p = 0.0;
  double c = 0.0;
  std::optional<int> eta_index;  // absent: no divergence on the grid
  std::optional<double> eta;
};

struct SweepResult {
  std::vector<double> grid;  // the eta grid, ascending
  std::vector<SweepCell> cells;
  std::vector<SweepThreshold> thresholds;
};

// Ratio recorded when a trajectory leaves the representable range.
inline constexpr double kOverflowSentinel = 1e30;

// Runs the step-size sweep: for every (p, c_j) row, cells are processed in
// increasing eta order and the row stops at the first detected divergence.
// Rows are independent; cfg.threads > 1 distributes them without changing
// any result.  Trajectory streams depend only on the cell coordinates and
// the init index, so results are independent of execution order.
SweepResult run_sweep(const SweepConfig& cfg);

// First index i >= 1 with means[i] >= factor * means[i-1]; empty input is an
// error, a single-element list has no divergence.
std::optional<int> detect_divergence(const std::vector<double>& means,
                                     double factor);

// CSV with one "cell" row per grid cell and one "threshold" row per (p, c_j),
// 10-significant-digit reals, rows ordered by (p, c, eta).
void emit_csv(const SweepResult& result, const std::string& path);
// The per-step driver trace.
void emit_csv(const RunRecord& record, const std::string& path);
std::string sweep_csv(const SweepResult& result);

// Static line chart (mean with a 2-sigma band against log eta, divergence
// threshold as a vertical rule) for one (p, c_j) row.  Presentation only.
std::string svg_chart(const SweepResult& result, double p, double c);

// Single-run configuration for the `run` and `params` CLI subcommands.
struct RunConfig {
  ObjectiveSpec objective;
  std::string algorithm = "gd";  // gd | adaptive_gd | sgd | perturbed_gd |
                                 // restarted_sgd
  std::string target = "fosp";   // fosp | sosp
  double eps = 1e-2;
  double delta_conf = 0.1;
  double sigma = 0.0;            // constant noise envelope; 0 = exact oracle
  double c = 1e-4;               // perturbed gd hyperparameter
  double c_max = 1e-4;
  double scale = 1.0;
  double eta_override = 0.0;     // > 0 replaces the derived step
  std::int64_t k0_override = 0;  // sgd only, paired with eta_override
  std::int64_t oracle_budget = 100000;
  std::uint64_t seed = 0;
  double init_scale = 1.0;       // gaussian init unless init_point is set
  std::vector<double> init_point;
};

SweepConfig sweep_config_from(const Config& cfg);
RunConfig run_config_from(const Config& cfg);

struct VerifyCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct VerifyReport {
  std::vector<VerifyCheck> checks;
  bool all_passed() const;
};

// Certification checks for one objective: finite-difference gradient and
// Hessian agreement, self-bounding envelope certificates on the initial
// sublevel set, the Hessian-difference bound, stationarity of the declared
// optima, and monotonicity of the derived constants.
VerifyReport verify_objective(const Objective& obj, std::uint64_t seed);

// Runs verify_objective over each named catalog objective.
VerifyReport verify_suite(const std::vector<std::string>& names,
                          std::uint64_t seed);

}  // namespace descent
