#include "descent/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "descent/calculus.hpp"

namespace descent {

namespace {

std::string fmt10(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& raw) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(raw, &pos);
    if (pos != raw.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': cannot parse '" + raw +
                      "' as a real");
  }
}

std::int64_t parse_int(const std::string& key, const std::string& raw) {
  try {
    std::size_t pos = 0;
    const long long v = std::stoll(raw, &pos);
    if (pos != raw.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': cannot parse '" + raw +
                      "' as an integer");
  }
}

}  // namespace

bool Config::has(const std::string& key) const { return kv.count(key) > 0; }

std::string Config::get_string(const std::string& key) const {
  auto it = kv.find(key);
  if (it == kv.end()) throw ConfigError("missing config key '" + key + "'");
  return it->second;
}

std::string Config::get_string_or(const std::string& key,
                                  const std::string& fallback) const {
  auto it = kv.find(key);
  return it == kv.end() ? fallback : it->second;
}

double Config::get_double(const std::string& key) const {
  return parse_double(key, get_string(key));
}

double Config::get_double_or(const std::string& key, double fallback) const {
  auto it = kv.find(key);
  return it == kv.end() ? fallback : parse_double(key, it->second);
}

std::int64_t Config::get_int(const std::string& key) const {
  return parse_int(key, get_string(key));
}

std::int64_t Config::get_int_or(const std::string& key,
                                std::int64_t fallback) const {
  auto it = kv.find(key);
  return it == kv.end() ? fallback : parse_int(key, it->second);
}

std::uint64_t Config::get_uint64_or(const std::string& key,
                                    std::uint64_t fallback) const {
  auto it = kv.find(key);
  if (it == kv.end()) return fallback;
  try {
    std::size_t pos = 0;
    const unsigned long long v = std::stoull(it->second, &pos);
    if (pos != it->second.size())
      throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': cannot parse '" +
                      it->second + "' as an unsigned integer");
  }
}

std::vector<double> Config::get_list(const std::string& key) const {
  const std::string raw = get_string(key);
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= raw.size()) {
    std::size_t comma = raw.find(',', start);
    const std::string piece =
        trim(comma == std::string::npos ? raw.substr(start)
                                        : raw.substr(start, comma - start));
    if (!piece.empty()) out.push_back(parse_double(key, piece));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  if (out.empty())
    throw ConfigError("config key '" + key + "': empty list");
  return out;
}

Config parse_config_text(const std::string& text) {
  Config cfg;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) +
                        ": expected key=value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw ConfigError("config line " + std::to_string(lineno) +
                        ": empty key");
    if (cfg.kv.count(key))
      throw ConfigError("config line " + std::to_string(lineno) +
                        ": duplicate key '" + key + "'");
    cfg.kv[key] = value;
  }
  return cfg;
}

Config parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

Objective make_objective(const ObjectiveSpec& spec) {
  if (spec.dim < 1) throw ConfigError("objective.dim must be positive");
  if (spec.name == "monomial") {
    Vec diag = spec.diag;
    if (diag.empty()) {
      // Harmonic ramp diag(1/d, 1/(d-1), ..., 1/2, 1).
      diag.resize(spec.dim);
      for (int i = 0; i < spec.dim; ++i)
        diag[i] = 1.0 / double(spec.dim - i);
    }
    if (static_cast<int>(diag.size()) != spec.dim)
      throw ConfigError("objective.diag length must equal objective.dim");
    try {
      return monomial_norm(spec.p, diag);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }
  if (spec.name == "quadratic") {
    Vec diag = spec.diag.empty() ? Vec(spec.dim, 1.0) : spec.diag;
    if (static_cast<int>(diag.size()) != spec.dim)
      throw ConfigError("objective.diag length must equal objective.dim");
    try {
      return quadratic(diag);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }
  if (spec.name == "phase_retrieval") {
    Vec ws(spec.dim, 0.0);
    ws[0] = 1.0;
    return phase_retrieval(ws);
  }
  if (spec.name == "matrix_pca") {
    Vec lam = spec.diag;
    if (lam.empty()) {
      lam.assign(spec.dim, 0.5);
      lam[0] = 2.0;
      if (spec.dim > 1) lam[1] = 1.0;
    }
    if (static_cast<int>(lam.size()) != spec.dim)
      throw ConfigError("objective.diag length must equal objective.dim");
    SymMat m(spec.dim);
    for (int i = 0; i < spec.dim; ++i) m.at(i, i) = lam[i];
    try {
      return matrix_pca(m);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }
  if (spec.name == "log_secant") {
    if (spec.dim != 1) throw ConfigError("log_secant: objective.dim must be 1");
    return log_secant();
  }
  throw ConfigError("unknown objective '" + spec.name + "'");
}

std::optional<int> detect_divergence(const std::vector<double>& means,
                                     double factor) {
  if (means.empty())
    throw std::invalid_argument("detect_divergence: empty input");
  for (std::size_t i = 1; i < means.size(); ++i)
    if (means[i] >= factor * means[i - 1]) return static_cast<int>(i);
  return std::nullopt;
}

namespace {

void validate_sweep(const SweepConfig& cfg) {
  if (cfg.objective.name != "monomial")
    throw ConfigError("sweep: only the monomial family is sweepable");
  if (cfg.objective.dim < 1) throw ConfigError("sweep: dim must be positive");
  if (cfg.grid_count < 2) throw ConfigError("sweep: grid count must be >= 2");
  if (cfg.iterations < 1)
    throw ConfigError("sweep: iterations must be >= 1");
  if (cfg.inits_per_cell < 1)
    throw ConfigError("sweep: inits_per_cell must be >= 1");
  if (cfg.p_list.empty()) throw ConfigError("sweep: empty p list");
  for (double p : cfg.p_list)
    if (!(p >= 2.0)) throw ConfigError("sweep: exponents must be >= 2");
  if (cfg.init_scales.empty()) throw ConfigError("sweep: empty init scales");
  for (double c : cfg.init_scales)
    if (!(c > 0.0)) throw ConfigError("sweep: init scales must be positive");
  if (!(cfg.log_max_exp > cfg.log_min_exp))
    throw ConfigError("sweep: grid exponent range is empty");
  if (cfg.algorithm != "gd" && cfg.algorithm != "sgd")
    throw ConfigError("sweep: algorithm must be gd or sgd");
  if (cfg.noise_kind != "gaussian" && cfg.noise_kind != "ball")
    throw ConfigError("sweep: noise kind must be gaussian or ball");
  if (!(cfg.noise_scale >= 0.0))
    throw ConfigError("sweep: noise scale must be non-negative");
  if (!(cfg.divergence_factor > 1.0))
    throw ConfigError("sweep: divergence factor must exceed 1");
  if (cfg.threads < 1) throw ConfigError("sweep: threads must be >= 1");
}

double trajectory_ratio(const Objective& obj, const SweepConfig& cfg,
                        double eta, double init_scale, Rng& rng) {
  const int d = obj.dim;
  Vec w = sample_gaussian(rng, d, std::sqrt(init_scale));
  const double f0 = obj.eval_value(w);
  if (!std::isfinite(f0) || f0 <= 0.0) return kOverflowSentinel;
  const bool noisy = cfg.algorithm == "sgd";
  const bool gauss = cfg.noise_kind == "gaussian";
  for (int t = 0; t < cfg.iterations; ++t) {
    Vec g = obj.eval_gradient(w);
    if (noisy) {
      if (gauss)
        axpy(1.0, sample_gaussian(rng, d, cfg.noise_scale), g);
      else
        axpy(1.0, sample_uniform_ball(rng, d, cfg.noise_scale), g);
    }
    if (!all_finite(g)) return kOverflowSentinel;
    axpy(-eta, g, w);
    if (!all_finite(w)) return kOverflowSentinel;
  }
  const double ratio = norm2(obj.eval_gradient(w)) / f0;
  return std::isfinite(ratio) ? ratio : kOverflowSentinel;
}

SweepCell compute_cell(const Objective& obj, const SweepConfig& cfg,
                       std::size_t p_idx, std::size_t c_idx, int eta_idx,
                       double eta) {
  SweepCell cell;
  cell.p = cfg.p_list[p_idx];
  cell.c = cfg.init_scales[c_idx];
  cell.eta_index = eta_idx;
  cell.eta = eta;
  cell.n = cfg.inits_per_cell;
  std::vector<double> ratios(static_cast<std::size_t>(cfg.inits_per_cell));
  for (int i = 0; i < cfg.inits_per_cell; ++i) {
    Rng rng(cfg.base_seed,
            derive_stream(p_idx, c_idx, static_cast<std::uint64_t>(eta_idx),
                          static_cast<std::uint64_t>(i)));
    ratios[static_cast<std::size_t>(i)] =
        trajectory_ratio(obj, cfg, eta, cell.c, rng);
    if (ratios[static_cast<std::size_t>(i)] >= kOverflowSentinel)
      cell.overflowed = true;
  }
  double sum = 0.0;
  for (double r : ratios) sum += r;
  cell.mean_ratio = sum / double(ratios.size());
  if (ratios.size() > 1) {
    double acc = 0.0;
    for (double r : ratios) {
      const double d = r - cell.mean_ratio;
      acc += d * d;
    }
    cell.std_ratio = std::sqrt(acc / double(ratios.size() - 1));
  }
  return cell;
}

}  // namespace

SweepResult run_sweep(const SweepConfig& cfg) {
  validate_sweep(cfg);

  SweepResult result;
  result.grid.resize(static_cast<std::size_t>(cfg.grid_count));
  for (int i = 0; i < cfg.grid_count; ++i)
    result.grid[static_cast<std::size_t>(i)] =
        std::pow(10.0, cfg.log_min_exp + (cfg.log_max_exp - cfg.log_min_exp) *
                                             double(i) /
                                             double(cfg.grid_count - 1));

  struct Row {
    std::size_t p_idx, c_idx;
  };
  std::vector<Row> rows;
  for (std::size_t pi = 0; pi < cfg.p_list.size(); ++pi)
    for (std::size_t ci = 0; ci < cfg.init_scales.size(); ++ci)
      rows.push_back({pi, ci});

  std::vector<std::vector<SweepCell>> row_cells(rows.size());
  std::vector<SweepThreshold> row_thresholds(rows.size());

  auto run_row = [&](std::size_t r) {
    const Row& row = rows[r];
    ObjectiveSpec spec = cfg.objective;
    spec.p = cfg.p_list[row.p_idx];
    const Objective obj = make_objective(spec);
    SweepThreshold thr;
    thr.p = cfg.p_list[row.p_idx];
    thr.c = cfg.init_scales[row.c_idx];
    std::vector<double> means;
    for (int ei = 0; ei < cfg.grid_count; ++ei) {
      SweepCell cell =
          compute_cell(obj, cfg, row.p_idx, row.c_idx, ei,
                       result.grid[static_cast<std::size_t>(ei)]);
      means.push_back(cell.mean_ratio);
      row_cells[r].push_back(cell);
      if (ei >= 1 &&
          means[static_cast<std::size_t>(ei)] >=
              cfg.divergence_factor * means[static_cast<std::size_t>(ei - 1)]) {
        thr.eta_index = ei;
        thr.eta = result.grid[static_cast<std::size_t>(ei)];
        break;  // the row stops scanning once divergence is found
      }
    }
    row_thresholds[r] = thr;
  };

  const std::size_t nthreads =
      std::min<std::size_t>(static_cast<std::size_t>(cfg.threads), rows.size());
  if (nthreads <= 1) {
    for (std::size_t r = 0; r < rows.size(); ++r) run_row(r);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(nthreads);
    for (std::size_t t = 0; t < nthreads; ++t)
      pool.emplace_back([&] {
        for (;;) {
          const std::size_t r = next.fetch_add(1);
          if (r >= rows.size()) return;
          run_row(r);
        }
      });
    for (auto& th : pool) th.join();
  }

  for (std::size_t r = 0; r < rows.size(); ++r) {
    result.cells.insert(result.cells.end(), row_cells[r].begin(),
                        row_cells[r].end());
    result.thresholds.push_back(row_thresholds[r]);
  }
  return result;
}

std::string sweep_csv(const SweepResult& result) {
  std::vector<SweepCell> cells = result.cells;
  std::sort(cells.begin(), cells.end(),
            [](const SweepCell& a, const SweepCell& b) {
              if (a.p != b.p) return a.p < b.p;
              if (a.c != b.c) return a.c < b.c;
              return a.eta_index < b.eta_index;
            });
  std::vector<SweepThreshold> thresholds = result.thresholds;
  std::sort(thresholds.begin(), thresholds.end(),
            [](const SweepThreshold& a, const SweepThreshold& b) {
              if (a.p != b.p) return a.p < b.p;
              return a.c < b.c;
            });

  std::string out =
      "kind,p,c,eta_index,eta,mean_ratio,std_ratio,n,overflowed\n";
  for (const SweepCell& cell : cells) {
    out += "cell," + fmt10(cell.p) + "," + fmt10(cell.c) + "," +
           std::to_string(cell.eta_index) + "," + fmt10(cell.eta) + "," +
           fmt10(cell.mean_ratio) + "," + fmt10(cell.std_ratio) + "," +
           std::to_string(cell.n) + "," + (cell.overflowed ? "1" : "0") + "\n";
  }
  for (const SweepThreshold& thr : thresholds) {
    out += "threshold," + fmt10(thr.p) + "," + fmt10(thr.c) + ",";
    out += thr.eta_index ? std::to_string(*thr.eta_index) : std::string();
    out += ",";
    out += thr.eta ? fmt10(*thr.eta) : std::string();
    out += ",,,,\n";
  }
  return out;
}

namespace {

void write_file(const std::string& path, const std::string& content,
                const char* what) {
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw std::runtime_error(std::string(what) + ": cannot open '" + path +
                             "' for writing");
  out << content;
  out.flush();
  if (!out.good())
    throw std::runtime_error(std::string(what) + ": write failed for '" +
                             path + "'");
}

}  // namespace

void emit_csv(const SweepResult& result, const std::string& path) {
  write_file(path, sweep_csv(result), "emit_csv");
}

void emit_csv(const RunRecord& record, const std::string& path) {
  write_file(path, trace_csv(record), "emit_csv");
}

std::string svg_chart(const SweepResult& result, double p, double c) {
  std::vector<const SweepCell*> row;
  for (const SweepCell& cell : result.cells)
    if (cell.p == p && cell.c == c) row.push_back(&cell);
  std::sort(row.begin(), row.end(), [](const SweepCell* a, const SweepCell* b) {
    return a->eta_index < b->eta_index;
  });
  const SweepThreshold* thr = nullptr;
  for (const SweepThreshold& t : result.thresholds)
    if (t.p == p && t.c == c) thr = &t;

  const double W = 640, H = 400, ml = 70, mr = 20, mt = 20, mb = 45;
  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W
      << "\" height=\"" << H << "\" viewBox=\"0 0 " << W << " " << H
      << "\">\n";
  svg << "<rect width=\"" << W << "\" height=\"" << H
      << "\" fill=\"white\"/>\n";
  if (row.empty() || result.grid.empty()) {
    svg << "<text x=\"20\" y=\"40\">no data</text>\n</svg>\n";
    return svg.str();
  }

  auto clampv = [](double v) {
    return std::min(std::max(v, 1e-12), 1e32);
  };
  const double x0 = std::log10(result.grid.front());
  const double x1 = std::log10(result.grid.back());
  double ylo = 1e300, yhi = -1e300;
  for (const SweepCell* cell : row) {
    ylo = std::min(ylo, std::log10(clampv(cell->mean_ratio -
                                          2.0 * cell->std_ratio)));
    yhi = std::max(yhi, std::log10(clampv(cell->mean_ratio +
                                          2.0 * cell->std_ratio)));
  }
  if (yhi - ylo < 1.0) yhi = ylo + 1.0;
  auto px = [&](double eta) {
    return ml + (std::log10(eta) - x0) / (x1 - x0) * (W - ml - mr);
  };
  auto py = [&](double v) {
    return H - mb - (std::log10(clampv(v)) - ylo) / (yhi - ylo) * (H - mt - mb);
  };
  auto polyline = [&](double offset_sigma, const char* color,
                      const char* dash) {
    std::ostringstream pts;
    for (const SweepCell* cell : row)
      pts << px(cell->eta) << ","
          << py(cell->mean_ratio + offset_sigma * cell->std_ratio) << " ";
    svg << "<polyline fill=\"none\" stroke=\"" << color
        << "\" stroke-width=\"1.5\"" << dash << " points=\"" << pts.str()
        << "\"/>\n";
  };
  svg << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << W - ml - mr
      << "\" height=\"" << H - mt - mb
      << "\" fill=\"none\" stroke=\"#888\"/>\n";
  polyline(0.0, "#1f77b4", "");
  polyline(2.0, "#9ecae1", " stroke-dasharray=\"4 3\"");
  polyline(-2.0, "#9ecae1", " stroke-dasharray=\"4 3\"");
  if (thr && thr->eta) {
    const double x = px(*thr->eta);
    svg << "<line x1=\"" << x << "\" y1=\"" << mt << "\" x2=\"" << x
        << "\" y2=\"" << H - mb << "\" stroke=\"red\" stroke-width=\"1.5\"/>\n";
  }
  svg << "<text x=\"" << ml << "\" y=\"" << H - 12
      << "\" font-size=\"13\">log10 step size, p=" << fmt10(p)
      << " c=" << fmt10(c) << "</text>\n";
  svg << "<text x=\"12\" y=\"" << mt + 12
      << "\" font-size=\"13\">log10 ratio</text>\n";
  svg << "</svg>\n";
  return svg.str();
}

namespace {

void check_known_keys(const Config& cfg,
                      const std::vector<std::string>& allowed) {
  for (const auto& [key, value] : cfg.kv) {
    (void)value;
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      throw ConfigError("unknown config key '" + key + "'");
  }
}

}  // namespace

SweepConfig sweep_config_from(const Config& cfg) {
  check_known_keys(
      cfg, {"objective.name", "objective.dim", "objective.diag",
            "sweep.p_list", "sweep.grid.log_min_exp", "sweep.grid.log_max_exp",
            "sweep.grid.count", "sweep.init_scales", "sweep.inits_per_cell",
            "sweep.iterations", "sweep.algorithm", "sweep.noise.kind",
            "sweep.noise.scale", "sweep.divergence_factor", "sweep.threads",
            "base_seed"});
  SweepConfig out;
  out.objective.name = cfg.get_string_or("objective.name", "monomial");
  out.objective.dim =
      static_cast<int>(cfg.get_int_or("objective.dim", out.objective.dim));
  if (cfg.has("objective.diag")) out.objective.diag = cfg.get_list("objective.diag");
  if (cfg.has("sweep.p_list")) out.p_list = cfg.get_list("sweep.p_list");
  out.log_min_exp = cfg.get_double_or("sweep.grid.log_min_exp", out.log_min_exp);
  out.log_max_exp = cfg.get_double_or("sweep.grid.log_max_exp", out.log_max_exp);
  out.grid_count =
      static_cast<int>(cfg.get_int_or("sweep.grid.count", out.grid_count));
  if (cfg.has("sweep.init_scales"))
    out.init_scales = cfg.get_list("sweep.init_scales");
  out.inits_per_cell = static_cast<int>(
      cfg.get_int_or("sweep.inits_per_cell", out.inits_per_cell));
  out.iterations =
      static_cast<int>(cfg.get_int_or("sweep.iterations", out.iterations));
  out.algorithm = cfg.get_string_or("sweep.algorithm", out.algorithm);
  out.noise_kind = cfg.get_string_or("sweep.noise.kind", out.noise_kind);
  out.noise_scale = cfg.get_double_or("sweep.noise.scale", out.noise_scale);
  out.divergence_factor =
      cfg.get_double_or("sweep.divergence_factor", out.divergence_factor);
  out.threads = static_cast<int>(cfg.get_int_or("sweep.threads", out.threads));
  out.base_seed = cfg.get_uint64_or("base_seed", out.base_seed);
  validate_sweep(out);
  return out;
}

RunConfig run_config_from(const Config& cfg) {
  check_known_keys(
      cfg, {"objective.name", "objective.dim", "objective.p", "objective.diag",
            "run.algorithm", "run.target", "run.eps", "run.delta_conf",
            "run.sigma", "run.c", "run.c_max", "run.scale", "run.eta",
            "run.k0", "run.budget", "init.scale", "init.point", "base_seed"});
  RunConfig out;
  out.objective.name = cfg.get_string_or("objective.name", "quadratic");
  out.objective.dim =
      static_cast<int>(cfg.get_int_or("objective.dim", out.objective.dim));
  out.objective.p = cfg.get_double_or("objective.p", out.objective.p);
  if (cfg.has("objective.diag"))
    out.objective.diag = cfg.get_list("objective.diag");
  out.algorithm = cfg.get_string_or("run.algorithm", out.algorithm);
  out.target = cfg.get_string_or("run.target", out.target);
  out.eps = cfg.get_double_or("run.eps", out.eps);
  out.delta_conf = cfg.get_double_or("run.delta_conf", out.delta_conf);
  out.sigma = cfg.get_double_or("run.sigma", out.sigma);
  out.c = cfg.get_double_or("run.c", out.c);
  out.c_max = cfg.get_double_or("run.c_max", out.c_max);
  out.scale = cfg.get_double_or("run.scale", out.scale);
  out.eta_override = cfg.get_double_or("run.eta", out.eta_override);
  out.k0_override = cfg.get_int_or("run.k0", out.k0_override);
  out.oracle_budget = cfg.get_int_or("run.budget", out.oracle_budget);
  out.seed = cfg.get_uint64_or("base_seed", out.seed);
  out.init_scale = cfg.get_double_or("init.scale", out.init_scale);
  if (cfg.has("init.point")) out.init_point = cfg.get_list("init.point");

  static const std::vector<std::string> algos = {
      "gd", "adaptive_gd", "sgd", "perturbed_gd", "restarted_sgd"};
  if (std::find(algos.begin(), algos.end(), out.algorithm) == algos.end())
    throw ConfigError("run.algorithm must be one of gd, adaptive_gd, sgd, "
                      "perturbed_gd, restarted_sgd");
  if (out.target != "fosp" && out.target != "sosp")
    throw ConfigError("run.target must be fosp or sosp");
  if (!(out.eps > 0.0) || !std::isfinite(out.eps))
    throw ConfigError("run.eps must be positive");
  if (!(out.delta_conf > 0.0) || !(out.delta_conf < 1.0))
    throw ConfigError("run.delta_conf must lie in (0, 1)");
  if (!(out.sigma >= 0.0) || !std::isfinite(out.sigma))
    throw ConfigError("run.sigma must be non-negative");
  if (!(out.scale > 0.0)) throw ConfigError("run.scale must be positive");
  if (out.eta_override < 0.0) throw ConfigError("run.eta must be non-negative");
  if (out.k0_override < 0) throw ConfigError("run.k0 must be non-negative");
  if (out.oracle_budget < 1) throw ConfigError("run.budget must be >= 1");
  if (!out.init_point.empty() &&
      static_cast<int>(out.init_point.size()) != out.objective.dim)
    throw ConfigError("init.point length must equal objective.dim");
  if (!(out.init_scale > 0.0))
    throw ConfigError("init.scale must be positive");
  return out;
}

namespace {

Vec fd_gradient(const Objective& obj, const Vec& w, double h) {
  Vec g(static_cast<std::size_t>(obj.dim));
  for (int i = 0; i < obj.dim; ++i) {
    Vec wp = w, wm = w;
    wp[static_cast<std::size_t>(i)] += h;
    wm[static_cast<std::size_t>(i)] -= h;
    g[static_cast<std::size_t>(i)] =
        (obj.eval_value(wp) - obj.eval_value(wm)) / (2.0 * h);
  }
  return g;
}

SymMat fd_hessian(const Objective& obj, const Vec& w, double h) {
  SymMat m(obj.dim);
  for (int i = 0; i < obj.dim; ++i) {
    Vec wp = w, wm = w;
    wp[static_cast<std::size_t>(i)] += h;
    wm[static_cast<std::size_t>(i)] -= h;
    const Vec gp = obj.eval_gradient(wp);
    const Vec gm = obj.eval_gradient(wm);
    for (int j = 0; j < obj.dim; ++j)
      m.at(i, j) = (gp[static_cast<std::size_t>(j)] -
                    gm[static_cast<std::size_t>(j)]) /
                   (2.0 * h);
  }
  for (int i = 0; i < obj.dim; ++i)
    for (int j = i + 1; j < obj.dim; ++j) {
      const double s = 0.5 * (m.at(i, j) + m.at(j, i));
      m.at(i, j) = s;
      m.at(j, i) = s;
    }
  return m;
}

double op_norm(const SymMat& m) {
  SymMat neg = m;
  for (double& v : neg.a) v = -v;
  return std::max(std::abs(sym_eig_min(m).value),
                  std::abs(sym_eig_min(neg).value));
}

// Sampling region per objective: a gaussian (or in-domain uniform) proposal
// plus the value cap that delimits the initial sublevel set the regularity
// certificates are stated on.  Envelopes with no regional caveat get an
// effectively unbounded cap.
struct SampleRegion {
  double scale = 0.8;
  double cap = 1e6;
  bool interval = false;  // log_secant: uniform over its domain interval
};

SampleRegion sample_region(const Objective& obj) {
  SampleRegion region;
  if (obj.name == "log_secant") {
    region.interval = true;
  } else if (obj.name == "phase_retrieval" || obj.name == "matrix_pca") {
    region.scale = obj.name == "phase_retrieval" ? 0.55 : 0.6;
    region.cap = obj.eval_value(Vec(static_cast<std::size_t>(obj.dim), 0.0)) +
                 1.0;
  }
  return region;
}

// Rejection-samples a point of the objective's sublevel region.
Vec sample_point(const Objective& obj, const SampleRegion& region, Rng& rng) {
  for (int attempt = 0; attempt < 2000; ++attempt) {
    Vec w = region.interval
                ? Vec{-2.2 + 2.55 * rng.uniform()}
                : sample_gaussian(rng, obj.dim, region.scale);
    if (obj.eval_value(w) <= region.cap) return w;
  }
  throw std::runtime_error("verify: sublevel sampling stalled for " +
                           obj.name);
}

ObjectiveSpec canonical_spec(const std::string& name) {
  ObjectiveSpec spec;
  spec.name = name;
  if (name == "monomial") {
    spec.dim = 5;
    spec.p = 3.0;
  } else if (name == "log_secant") {
    spec.dim = 1;
  } else if (name == "matrix_pca") {
    spec.dim = 4;
  } else {
    spec.dim = 5;
  }
  return spec;
}

}  // namespace

bool VerifyReport::all_passed() const {
  for (const VerifyCheck& c : checks)
    if (!c.passed) return false;
  return true;
}

VerifyReport verify_objective(const Objective& obj, std::uint64_t seed) {
  VerifyReport report;
  const std::string& name = obj.name;
  const SampleRegion region = sample_region(obj);

  {
    Rng rng(seed, derive_stream(71, 1));
    double worst = 0.0;
    for (int k = 0; k < 100; ++k) {
      const Vec w = sample_point(obj, region, rng);
      const Vec g = obj.eval_gradient(w);
      const Vec fd = fd_gradient(obj, w, 1e-6);
      worst = std::max(worst, norm2(sub(fd, g)) / (1.0 + norm2(g)));
    }
    report.checks.push_back({name + ": gradient matches finite differences",
                             worst <= 1e-5,
                             "worst relative error " + fmt10(worst)});
  }

  if (obj.has_hessian()) {
    Rng rng(seed, derive_stream(71, 2));
    double worst = 0.0;
    for (int k = 0; k < 100; ++k) {
      const Vec w = sample_point(obj, region, rng);
      const SymMat h = obj.eval_hessian(w);
      const SymMat fd = fd_hessian(obj, w, 1e-5);
      double diff = 0.0;
      for (std::size_t i = 0; i < h.a.size(); ++i)
        diff = std::max(diff, std::abs(h.a[i] - fd.a[i]));
      worst = std::max(worst, diff / (1.0 + h.max_abs()));
    }
    report.checks.push_back({name + ": hessian matches finite differences",
                             worst <= 1e-5,
                             "worst relative error " + fmt10(worst)});
  }

  {
    Rng rng(seed, derive_stream(71, 3));
    double worst = -1e300;
    bool ok = true;
    for (int k = 0; k < 1000; ++k) {
      const Vec w = sample_point(obj, region, rng);
      const double f = obj.eval_value(w);
      const double margin = norm2(obj.eval_gradient(w)) - rho0(obj.profile, f);
      worst = std::max(worst, margin);
      if (margin > 1e-6) ok = false;
    }
    report.checks.push_back({name + ": gradient envelope certificate", ok,
                             "worst margin " + fmt10(worst)});
  }

  if (obj.has_hessian()) {
    Rng rng(seed, derive_stream(71, 4));
    double worst = -1e300;
    bool ok = true;
    for (int k = 0; k < 1000; ++k) {
      const Vec w = sample_point(obj, region, rng);
      const double f = obj.eval_value(w);
      const double margin = op_norm(obj.eval_hessian(w)) - obj.profile.rho1(f);
      worst = std::max(worst, margin);
      if (margin > 1e-6) ok = false;
    }
    report.checks.push_back({name + ": curvature envelope certificate", ok,
                             "worst margin " + fmt10(worst)});
  }

  if (obj.has_hessian() && obj.profile.rho2) {
    Rng rng(seed, derive_stream(71, 5));
    double worst = -1e300;
    bool ok = true;
    for (int k = 0; k < 1000; ++k) {
      const Vec w = sample_point(obj, region, rng);
      const Vec w2 = sample_point(obj, region, rng);
      const double fmax = std::max(obj.eval_value(w), obj.eval_value(w2));
      SymMat diff = obj.eval_hessian(w);
      const SymMat h2 = obj.eval_hessian(w2);
      for (std::size_t i = 0; i < diff.a.size(); ++i) diff.a[i] -= h2.a[i];
      const double margin = op_norm(diff) - (*obj.profile.rho2)(fmax) *
                                                norm2(sub(w, w2));
      worst = std::max(worst, margin);
      if (margin > 1e-6) ok = false;
    }
    report.checks.push_back({name + ": hessian difference certificate", ok,
                             "worst margin " + fmt10(worst)});
  }

  if (obj.optima) {
    bool ok = true;
    double worst = 0.0;
    for (const Vec& opt : *obj.optima) {
      const double gn = norm2(obj.eval_gradient(opt));
      worst = std::max(worst, gn);
      if (gn > 1e-8) ok = false;
    }
    report.checks.push_back({name + ": declared optima are stationary", ok,
                             "worst gradient norm " + fmt10(worst)});
  }

  {
    bool ok = true;
    double prev = 0.0;
    for (int k = 1; k <= 24; ++k) {
      const double x = 0.25 * double(k);
      const double r = rho0(obj.profile, x);
      if (r < prev) ok = false;
      prev = r;
    }
    report.checks.push_back(
        {name + ": gradient envelope is non-decreasing", ok, ""});
  }

  {
    const EffectiveConstants a = effective_constants(obj.profile, 1.0);
    const EffectiveConstants b = effective_constants(obj.profile, 2.0);
    bool ok = b.L1 >= a.L1;
    if (a.L2 && b.L2 && *b.L2 < *a.L2) ok = false;
    report.checks.push_back(
        {name + ": derived constants grow with the initial value", ok,
         "L1 " + fmt10(a.L1) + " -> " + fmt10(b.L1)});
  }

  return report;
}

VerifyReport verify_suite(const std::vector<std::string>& names,
                          std::uint64_t seed) {
  VerifyReport report;
  std::uint64_t obj_idx = 0;
  for (const std::string& name : names) {
    const Objective obj = make_objective(canonical_spec(name));
    ++obj_idx;
    const VerifyReport one = verify_objective(obj, mix64(seed + obj_idx));
    report.checks.insert(report.checks.end(), one.checks.begin(),
                         one.checks.end());
  }
  return report;
}

}  // namespace descent
