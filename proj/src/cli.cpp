#include "pvi/cli.hpp"

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <thread>

#include <omp.h>
#include <sys/utsname.h>

#include <CLI11.hpp>
#include <json.hpp>

#include "pvi/config.hpp"
#include "pvi/errors.hpp"
#include "pvi/io.hpp"
#include "pvi/oracles.hpp"
#include "pvi/validation.hpp"

namespace pvi {

namespace {

using ojson = nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

// Flags shared by the commands that run the Monte Carlo pipeline.
struct McFlags {
  std::optional<int> paths, steps, substeps, basis_degree;
  std::optional<double> eps;
};

struct Common {
  std::string config_path;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
  McFlags mc;
  std::string grid;
  std::string x0;
  std::string eps_list;
  std::string oracle = "fd";
  bool reversed = false;
  bool uniqueness = false;
  bool dump_solution = false;
};

std::vector<double> parse_list(const std::string& s, char sep, const std::string& what) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) {
    if (item.empty()) throw ConfigError(what + ": empty entry in \"" + s + "\"");
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != item.size() || !std::isfinite(v)) throw ConfigError(what + ": not a number: \"" + item + "\"");
    out.push_back(v);
  }
  return out;
}

Point parse_point(const std::string& s, int d, const std::string& what) {
  const auto v = parse_list(s, ':', what);
  if (static_cast<int>(v.size()) != d)
    throw ConfigError(what + ": point \"" + s + "\" needs " + std::to_string(d) + " coordinates separated by ':'");
  Point p(d);
  for (int i = 0; i < d; ++i) p[i] = v[static_cast<std::size_t>(i)];
  return p;
}

// "t=0.1,0.5;x=0,0.25,1" with x points written c1:c2:... when d > 1.
GridSpec parse_grid_flag(const std::string& s, int d) {
  GridSpec g;
  bool have_t = false, have_x = false;
  std::stringstream ss(s);
  std::string part;
  while (std::getline(ss, part, ';')) {
    if (part.rfind("t=", 0) == 0) {
      g.times = parse_list(part.substr(2), ',', "--grid t");
      have_t = true;
    } else if (part.rfind("x=", 0) == 0) {
      std::stringstream xs(part.substr(2));
      std::string item;
      while (std::getline(xs, item, ',')) g.points.push_back(parse_point(item, d, "--grid x"));
      have_x = true;
    } else {
      throw ConfigError("--grid: expected \"t=...;x=...\", got \"" + part + "\"");
    }
  }
  if (!have_t || !have_x || g.times.empty() || g.points.empty())
    throw ConfigError("--grid: both t= and x= lists are required");
  return g;
}

McConfig effective_mc(const RunConfig& cfg, const McFlags& f) {
  McConfig mc = cfg.mc;
  if (f.paths) mc.n_paths = *f.paths;
  if (f.steps) mc.n_steps = *f.steps;
  if (f.substeps) mc.substeps = *f.substeps;
  if (f.eps) mc.solver.eps = *f.eps;
  if (f.basis_degree) mc.solver.basis_degree = *f.basis_degree;
  if (mc.n_paths < 2) throw ConfigError("--paths must be at least 2");
  if (mc.n_steps < 1) throw ConfigError("--steps must be at least 1");
  if (mc.substeps < 1) throw ConfigError("--substeps must be at least 1");
  try {
    mc.solver.validate();
  } catch (const PreconditionError& e) {
    throw ConfigError(e.what());
  }
  return mc;
}

ojson mc_json(const McConfig& mc) {
  return ojson{{"paths", mc.n_paths},
               {"steps", mc.n_steps},
               {"substeps", mc.substeps},
               {"eps", mc.solver.eps},
               {"basis_degree", mc.solver.basis_degree},
               {"implicit_tol", mc.solver.implicit_tol},
               {"implicit_max_iter", mc.solver.implicit_max_iter},
               {"picard_iters", mc.solver.picard_iters},
               {"stability_cap", mc.solver.stability_cap}};
}

ojson check_json(const CheckEntry& e) {
  return ojson{{"name", e.name}, {"passed", e.passed}, {"margin", e.margin}, {"value", e.value}, {"detail", e.detail}};
}

ojson report_json(const ValidationReport& r) {
  ojson a = ojson::array();
  for (const auto& e : r.entries) a.push_back(check_json(e));
  return a;
}

std::vector<std::string> failures(const ValidationReport& r) {
  std::vector<std::string> out;
  for (const auto& e : r.entries)
    if (!e.passed) out.push_back(e.name);
  return out;
}

ojson environment_json() {
  ojson env;
  utsname u{};
  if (uname(&u) == 0) env["os"] = std::string(u.sysname) + " " + u.release + " " + u.machine;
#ifdef __VERSION__
  env["compiler"] = __VERSION__;
#endif
  env["cxx_standard"] = static_cast<long>(__cplusplus);
  env["eigen"] = std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                 std::to_string(EIGEN_MINOR_VERSION);
  env["openmp"] = static_cast<long>(_OPENMP);
  env["omp_max_threads"] = omp_get_max_threads();
  env["hardware_concurrency"] = std::thread::hardware_concurrency();
  const char* w = std::getenv("PVI_NUM_THREADS");
  env["PVI_NUM_THREADS"] = w ? ojson(w) : ojson(nullptr);
  return env;
}

// Collects output files, then writes the manifest with their digests.
class Run {
 public:
  Run(std::string command, const std::vector<std::string>& args, const Common& c)
      : command_(std::move(command)), args_(args), c_(c), start_(Clock::now()) {
    std::filesystem::create_directories(c_.out_dir);
  }

  void emit(const std::string& name, const std::string& content) {
    write_file(path(name), content);
    outputs_.push_back(name);
  }
  std::string path(const std::string& name) const { return (std::filesystem::path(c_.out_dir) / name).string(); }
  void phase(const std::string& name, Clock::time_point since) {
    timings_[name] = std::chrono::duration<double>(Clock::now() - since).count();
  }

  void finish(const RunConfig* cfg, const ojson& effective) {
    ojson m;
    m["artifact"] = "pvi";
    m["version"] = kArtifactVersion;
    m["command"] = command_;
    m["args"] = args_;
    m["seed"] = c_.seed ? ojson(*c_.seed) : ojson(nullptr);
    if (cfg) {
      m["config_path"] = c_.config_path;
      m["config"] = ojson::parse(cfg->canonical);
      m["config_sha256"] = sha256_hex(cfg->canonical);
    }
    m["effective"] = effective;
    timings_["total"] = std::chrono::duration<double>(Clock::now() - start_).count();
    m["timings_seconds"] = timings_;
    m["environment"] = environment_json();
    ojson digests = ojson::object();
    for (const auto& o : outputs_) digests[o] = sha256_file(path(o));
    m["outputs"] = digests;
    write_file(path("manifest.json"), json_text(m));
  }

 private:
  std::string command_;
  std::vector<std::string> args_;
  const Common& c_;
  Clock::time_point start_;
  std::vector<std::string> outputs_;
  ojson timings_ = ojson::object();
};

std::uint64_t seed_of(const Common& c) {
  if (!c.seed) throw ConfigError("--seed is required");
  return *c.seed;
}

// Backward-frame paths over [0, T] from x0 under the reversed coefficients:
// the solve whose Y_0 is u(T, x0).
PathBundle horizon_paths(const ProblemSpec& q, const Point& x0, const McConfig& mc, std::uint64_t seed) {
  SimulationOptions opts;
  opts.substeps = mc.substeps;
  return simulate(q, x0, TimeGrid(0.0, q.horizon(), mc.n_steps), mc.n_paths, seed, opts);
}

Point start_point(const Common& c, const ProblemSpec& p) {
  const int d = p.dimension();
  Point x0 = c.x0.empty() ? Point(0.5 * (p.domain().box_lower() + p.domain().box_upper()))
                          : parse_point(c.x0, d, "--x0");
  if (!(p.domain().level(x0) <= 1e-10)) throw DomainError("--x0 lies outside the closed domain");
  return x0;
}

int cmd_validate(const Common& c, const std::vector<std::string>& args) {
  const RunConfig cfg = load_config_file(c.config_path);
  Run run("validate", args, c);
  const std::uint64_t seed = c.seed.value_or(0);
  const ProblemSpec& p = *cfg.problem;
  const auto& v = cfg.validation;
  const auto t0 = Clock::now();

  const ValidationReport hyp = validate_assumptions(p, v.samples, seed, v.ranges);
  const CompatReport comp = check_compatibility(p, v.eps_list, v.samples, seed, v.ranges);
  const bool want_unique = v.check_uniqueness || c.uniqueness;
  std::optional<ValidationReport> uniq;
  if (want_unique) uniq = uniqueness_hypotheses_check(p, v.samples, seed, v.ranges);
  run.phase("validate", t0);

  std::vector<std::string> failed = failures(hyp);
  for (const CheckEntry* e : {&comp.yosida_product, &comp.boundary_g, &comp.interior_f})
    if (!e->passed) failed.push_back(e->name);
  if (uniq)
    for (const auto& n : failures(*uniq)) failed.push_back(n);

  ojson rep;
  rep["problem"] = p.name();
  rep["samples"] = v.samples;
  rep["seed"] = seed;
  rep["assumptions"] = report_json(hyp);
  ojson per_eps = ojson::array();
  for (const auto& e : comp.per_eps)
    per_eps.push_back(ojson{{"eps", e.eps},
                            {"yosida_product", check_json(e.yosida_product)},
                            {"boundary_g", check_json(e.boundary_g)},
                            {"interior_f", check_json(e.interior_f)}});
  rep["compatibility"] = ojson{{"yosida_product", check_json(comp.yosida_product)},
                               {"boundary_g", check_json(comp.boundary_g)},
                               {"interior_f", check_json(comp.interior_f)},
                               {"per_eps", per_eps}};
  rep["uniqueness"] = uniq ? report_json(*uniq) : ojson(nullptr);
  rep["violations"] = failed;
  rep["passed"] = failed.empty();
  run.emit("validation_report.json", json_text(rep));
  run.finish(&cfg, ojson{{"samples", v.samples}, {"eps_list", v.eps_list}, {"uniqueness", want_unique}});

  if (failed.empty()) {
    std::cout << "validate: all checks passed\n";
    return 0;
  }
  std::cerr << "validate: violated:";
  for (const auto& n : failed) std::cerr << ' ' << n;
  std::cerr << '\n';
  return 1;
}

int cmd_solve(const Common& c, const std::vector<std::string>& args) {
  const RunConfig cfg = load_config_file(c.config_path);
  const ProblemSpec& p = *cfg.problem;
  const std::uint64_t seed = seed_of(c);
  const McConfig mc = effective_mc(cfg, c.mc);
  GridSpec grid;
  if (!c.grid.empty()) grid = parse_grid_flag(c.grid, p.dimension());
  else if (cfg.grid) grid = *cfg.grid;
  else throw ConfigError("solve: no grid given (use --grid or the config's \"grid\")");

  Run run("solve", args, c);
  const auto t0 = Clock::now();
  const SolutionGrid sol = solve_grid(p, grid.times, grid.points, mc, seed);
  run.phase("solve", t0);
  const MembershipReport mem = domain_membership_report(sol, p);
  const ContinuityReport cont = continuity_report(sol);

  run.emit("grid.csv", grid_csv(sol));
  ojson sum;
  sum["config"] = ojson::parse(cfg.canonical);
  sum["monte_carlo"] = mc_json(mc);
  sum["seed"] = seed;
  sum["nodes"] = sol.values.size();
  sum["max_residual"] = sol.max_residual;
  sum["stability_warning"] = sol.stability_warning;
  ojson checks = ojson::array();
  for (const auto& m : mem.checks)
    checks.push_back(ojson{{"name", m.name},
                           {"applicable", m.applicable},
                           {"passed", m.passed},
                           {"min_margin", m.min_margin},
                           {"worst_node", m.worst_node}});
  sum["membership"] = ojson{{"kappa", mem.kappa}, {"passed", mem.all_passed()}, {"checks", checks}};
  sum["continuity"] = cont.empty ? ojson(nullptr)
                                 : ojson{{"max_jump_t", cont.max_jump_t},
                                         {"max_jump_x", cont.max_jump_x},
                                         {"max_slope_t", cont.max_slope_t},
                                         {"max_slope_x", cont.max_slope_x},
                                         {"max_std_error", cont.max_std_error}};
  run.emit("summary.json", json_text(sum));
  run.finish(&cfg, ojson{{"monte_carlo", mc_json(mc)}, {"times", grid.times}, {"points", grid.points.size()}});
  if (sol.stability_warning) std::cerr << "solve: warning: dt / eps exceeds the stability cap\n";
  std::cout << "solve: " << sol.values.size() << " nodes written to " << run.path("grid.csv") << '\n';
  return 0;
}

int cmd_sweep(const Common& c, const std::vector<std::string>& args) {
  const RunConfig cfg = load_config_file(c.config_path);
  const ProblemSpec& p = *cfg.problem;
  const std::uint64_t seed = seed_of(c);
  const McConfig mc = effective_mc(cfg, c.mc);
  const std::vector<double> eps = c.eps_list.empty() ? cfg.validation.eps_list : parse_list(c.eps_list, ',', "--eps-list");
  if (eps.size() < 3) {
    std::cerr << "sweep-eps: at least three eps values are required\n";
    return 1;
  }
  const Point x0 = start_point(c, p);

  Run run("sweep-eps", args, c);
  const auto t0 = Clock::now();
  const ProblemSpec q = p.time_reversed();
  const PathBundle paths = horizon_paths(q, x0, mc, seed);
  const Weights w{p.constants().lambda, p.constants().mu};
  const SweepTable tab = penalization_sweep(q, paths, eps, mc.solver, w);
  run.phase("sweep", t0);

  std::string csv = "eps,delta,weighted_sup_sq,rms,bound_ratio\r\n";
  for (const auto& r : tab.pairs)
    csv += format_double(r.eps) + ',' + format_double(r.delta) + ',' + format_double(r.weighted_sup_sq) + ',' +
           format_double(r.rms) + ',' + format_double(r.bound_ratio) + "\r\n";
  run.emit("sweep.csv", csv);
  ojson j;
  j["eps_list"] = tab.eps_list;
  j["estimates"] = tab.estimates;
  j["slope_defined"] = tab.slope_defined;
  j["slope_rms"] = tab.slope_defined ? ojson(tab.slope_rms) : ojson(nullptr);
  j["slope_sq"] = tab.slope_defined ? ojson(tab.slope_sq) : ojson(nullptr);
  j["M"] = tab.M;
  ojson pairs = ojson::array();
  for (const auto& r : tab.pairs)
    pairs.push_back(ojson{{"eps", r.eps},
                          {"delta", r.delta},
                          {"weighted_sup_sq", r.weighted_sup_sq},
                          {"rms", r.rms},
                          {"bound_ratio", r.bound_ratio}});
  j["pairs"] = pairs;
  j["weights"] = ojson{{"lambda", w.lambda}, {"mu", w.mu}};
  j["x0"] = std::vector<double>(x0.data(), x0.data() + x0.size());
  run.emit("sweep.json", json_text(j));
  run.finish(&cfg, ojson{{"monte_carlo", mc_json(mc)}, {"eps_list", eps}});
  if (tab.slope_defined) std::cout << "sweep-eps: fitted slope " << tab.slope_rms << '\n';
  else std::cout << "sweep-eps: slope undefined, all distances are numerically zero\n";
  return 0;
}

bool heat_series_applicable(const ProblemSpec& p) {
  const auto* iv = std::get_if<IntervalDomain>(&p.domain().variant());
  const auto& k = p.coefficients();
  auto is_const = [](const Expression& e, double v) { return e.is_constant() && e.constant_value() == v; };
  return iv && iv->left == 0.0 && iv->right == 1.0 && is_const(k.drift[0], 0.0) && is_const(k.diffusion[0], 1.0) &&
         is_const(k.f, 0.0) && is_const(k.g, 0.0) && p.phi().is_zero() && p.psi().is_zero();
}

int cmd_compare(const Common& c, const std::vector<std::string>& args) {
  const RunConfig cfg = load_config_file(c.config_path);
  const ProblemSpec& p = *cfg.problem;
  if (p.dimension() != 1) {
    std::cerr << "compare-oracle: oracle requires d=1\n";
    return 1;
  }
  const std::uint64_t seed = seed_of(c);
  const McConfig mc = effective_mc(cfg, c.mc);
  GridSpec grid;
  if (!c.grid.empty()) grid = parse_grid_flag(c.grid, 1);
  else if (cfg.grid) grid = *cfg.grid;
  else throw ConfigError("compare-oracle: no grid given (use --grid or the config's \"grid\")");
  if (c.oracle != "fd" && c.oracle != "series") throw ConfigError("--oracle must be fd or series");

  Run run("compare-oracle", args, c);
  auto t0 = Clock::now();
  const SolutionGrid sol = solve_grid(p, grid.times, grid.points, mc, seed);
  run.phase("monte_carlo", t0);
  const GridFunction a = to_grid_function(sol);

  t0 = Clock::now();
  GridFunction b;
  if (c.oracle == "series") {
    if (!heat_series_applicable(p))
      throw PreconditionError("series oracle needs the reflected heat problem on [0, 1] with f = g = 0 and phi = psi = 0");
    const auto coeff = cosine_coefficients([&](double x) { return p.h(make_point({x})); }, 64);
    b.t = a.t;
    b.x = a.x;
    for (double t : b.t)
      for (double x : b.x) b.values.push_back(neumann_heat_series(x, t, coeff, 64).value);
  } else {
    const FdGrid fd = solve_penalized_fd(p, mc.solver.eps, cfg.oracle.nx, cfg.oracle.nt, cfg.oracle.theta);
    run.emit("oracle_grid.csv", grid_csv(fd));
    b = to_grid_function(fd);
  }
  run.phase("oracle", t0);
  const CompareResult cmp = compare_at_nodes(a, b);
  const bool passed = cmp.sup <= cfg.oracle.tolerance;

  run.emit("grid.csv", grid_csv(sol));
  std::string csv = "t,x1,monte_carlo,oracle,diff\r\n";
  for (const auto& r : cmp.table)
    csv += format_double(r.t) + ',' + format_double(r.x) + ',' + format_double(r.a) + ',' + format_double(r.b) + ',' +
           format_double(r.diff) + "\r\n";
  run.emit("compare.csv", csv);
  ojson j{{"oracle", c.oracle},
          {"sup", cmp.sup},
          {"l2", cmp.l2},
          {"tolerance", cfg.oracle.tolerance},
          {"passed", passed},
          {"max_std_error", continuity_report(sol).max_std_error}};
  run.emit("compare.json", json_text(j));
  run.finish(&cfg, ojson{{"monte_carlo", mc_json(mc)},
                         {"oracle", ojson{{"kind", c.oracle},
                                          {"nx", cfg.oracle.nx},
                                          {"nt", cfg.oracle.nt},
                                          {"theta", cfg.oracle.theta},
                                          {"tolerance", cfg.oracle.tolerance}}}});
  std::cout << "compare-oracle: sup " << cmp.sup << ", l2 " << cmp.l2 << (passed ? " (pass)" : " (FAIL)") << '\n';
  return passed ? 0 : 1;
}

int cmd_simulate(const Common& c, const std::vector<std::string>& args) {
  const RunConfig cfg = load_config_file(c.config_path);
  const ProblemSpec& p = *cfg.problem;
  const std::uint64_t seed = seed_of(c);
  const McConfig mc = effective_mc(cfg, c.mc);
  const Point x0 = start_point(c, p);
  Run run("simulate-sde", args, c);
  const auto t0 = Clock::now();
  const ProblemSpec q = c.reversed ? p.time_reversed() : p;
  const PathBundle paths = horizon_paths(q, x0, mc, seed);
  run.phase("simulate", t0);
  run.emit("paths.csv", paths_csv(paths));
  run.finish(&cfg, ojson{{"monte_carlo", mc_json(mc)}, {"reversed", c.reversed}});
  std::cout << "simulate-sde: " << paths.n_paths << " paths written to " << run.path("paths.csv") << '\n';
  return 0;
}

int cmd_bounds(const Common& c, const std::vector<std::string>& args) {
  const RunConfig cfg = load_config_file(c.config_path);
  const ProblemSpec& p = *cfg.problem;
  const std::uint64_t seed = seed_of(c);
  const McConfig mc = effective_mc(cfg, c.mc);
  const Point x0 = start_point(c, p);
  Run run("bounds-report", args, c);
  const auto t0 = Clock::now();
  const ProblemSpec q = p.time_reversed();
  const PathBundle paths = horizon_paths(q, x0, mc, seed);
  const BackwardSolution sol = solve_backward(q, paths, mc.solver);
  const Weights w{p.constants().lambda, p.constants().mu};
  const BoundsReport rep = apriori_bounds_report(sol, q, paths, w);
  run.phase("solve", t0);

  ojson entries = ojson::array();
  for (const auto& e : rep.entries) entries.push_back(ojson{{"name", e.name}, {"lhs", e.lhs}, {"ratio", e.ratio}});
  const MeanSe est = sol.estimate();
  ojson j{{"M", rep.M},
          {"eps", sol.eps},
          {"weights", ojson{{"lambda", w.lambda}, {"mu", w.mu}}},
          {"estimate", ojson{{"value", est.mean}, {"std_error", est.se}}},
          {"entries", entries}};
  ojson regs = ojson::array();
  for (const auto& r : sol.regression)
    regs.push_back(ojson{{"n_features", r.n_features},
                         {"condition_number", r.condition_number},
                         {"ridge", r.ridge},
                         {"residual_rms", r.residual_rms}});
  j["diagnostics"] = ojson{{"max_residual", sol.max_residual},
                           {"stability_warning", sol.stability_warning},
                           {"warnings", sol.warnings},
                           {"regression", regs}};
  run.emit("bounds.json", json_text(j));
  if (c.dump_solution) run.emit("solution.csv", solution_csv(sol));
  run.finish(&cfg, ojson{{"monte_carlo", mc_json(mc)}});
  for (const auto& e : rep.entries) std::cout << "bounds-report: " << e.name << " ratio " << e.ratio << '\n';
  return 0;
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const ParseError*>(&e)) return 2;
  if (dynamic_cast<const DomainError*>(&e) || dynamic_cast<const PreconditionError*>(&e) ||
      dynamic_cast<const EvalError*>(&e))
    return 1;
  return 3;
}

void apply_thread_env() {
  const char* w = std::getenv("PVI_NUM_THREADS");
  if (!w) return;
  char* end = nullptr;
  const long n = std::strtol(w, &end, 10);
  if (end == w || *end != '\0' || n < 1 || n > 4096) throw ConfigError("PVI_NUM_THREADS must be a positive integer");
  omp_set_num_threads(static_cast<int>(n));
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
  CLI::App app{"Monte Carlo solver for parabolic variational inequalities with Neumann-type boundary relations"};
  app.require_subcommand(1);
  Common c;

  auto add_config = [&](CLI::App* s) {
    s->add_option("config", c.config_path, "JSON configuration file")->required();
    s->add_option("--out", c.out_dir, "Output directory")->capture_default_str();
  };
  auto add_seed = [&](CLI::App* s) { s->add_option("--seed", c.seed, "Seed for all random draws")->required(); };
  auto add_mc = [&](CLI::App* s) {
    s->add_option("--paths", c.mc.paths, "Monte Carlo paths per node");
    s->add_option("--steps", c.mc.steps, "Time steps");
    s->add_option("--substeps", c.mc.substeps, "Euler substeps per time step");
    s->add_option("--eps", c.mc.eps, "Yosida parameter (default 1e-3)");
    s->add_option("--basis-degree", c.mc.basis_degree, "Regression polynomial degree");
  };

  auto* validate = app.add_subcommand("validate", "Check the standing and compatibility hypotheses");
  add_config(validate);
  validate->add_option("--seed", c.seed, "Shift of the quasi-random samples (default 0)");
  validate->add_flag("--uniqueness", c.uniqueness, "Also check the comparison-principle hypotheses");

  auto* solve = app.add_subcommand("solve", "Estimate u on a grid of (t, x) nodes");
  add_config(solve);
  add_seed(solve);
  add_mc(solve);
  solve->add_option("--grid", c.grid, "Nodes as \"t=t1,t2;x=x1,x2\" (points c1:c2 when d > 1)");

  auto* sweep = app.add_subcommand("sweep-eps", "Pairwise distances of penalised solutions over eps");
  add_config(sweep);
  add_seed(sweep);
  add_mc(sweep);
  sweep->add_option("--eps-list", c.eps_list, "Strictly decreasing eps values, comma separated");
  sweep->add_option("--x0", c.x0, "Start point (default: domain centre)");

  auto* cmp = app.add_subcommand("compare-oracle", "Compare the Monte Carlo grid with a deterministic oracle");
  add_config(cmp);
  add_seed(cmp);
  add_mc(cmp);
  cmp->add_option("--grid", c.grid, "Nodes as \"t=t1,t2;x=x1,x2\"");
  cmp->add_option("--oracle", c.oracle, "fd or series")->capture_default_str();

  auto* sim = app.add_subcommand("simulate-sde", "Dump reflected paths and local times");
  add_config(sim);
  add_seed(sim);
  add_mc(sim);
  sim->add_option("--x0", c.x0, "Start point (default: domain centre)");
  sim->add_flag("--reversed", c.reversed, "Use the time-reversed coefficients");

  auto* bounds = app.add_subcommand("bounds-report", "Empirical a-priori estimate ratios");
  add_config(bounds);
  add_seed(bounds);
  add_mc(bounds);
  bounds->add_option("--x0", c.x0, "Start point (default: domain centre)");
  bounds->add_flag("--dump-solution", c.dump_solution, "Also write solution.csv");

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    apply_thread_env();
    if (validate->parsed()) return cmd_validate(c, args);
    if (solve->parsed()) return cmd_solve(c, args);
    if (sweep->parsed()) return cmd_sweep(c, args);
    if (cmp->parsed()) return cmd_compare(c, args);
    if (sim->parsed()) return cmd_simulate(c, args);
    if (bounds->parsed()) return cmd_bounds(c, args);
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e);
  }
  return 2;
}

int run_cli(int argc, const char* const* argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run_cli(args);
}

}  // namespace pvi
