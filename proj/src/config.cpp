#include "pvi/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "pvi/errors.hpp"

namespace pvi {

namespace {

using json = nlohmann::json;

// View of one JSON object with its path, for error messages and key checks.
class Obj {
 public:
  Obj(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) fail("expected an object");
  }

  [[noreturn]] void fail(const std::string& why) const { throw ConfigError(path_ + ": " + why); }

  void allow(std::initializer_list<const char*> keys) const {
    std::set<std::string> ok(keys.begin(), keys.end());
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!ok.count(it.key())) throw ConfigError(path_ + ": unknown key \"" + it.key() + "\"");
  }

  bool has(const char* key) const { return j_.contains(key); }
  const json& at(const char* key) const {
    if (!j_.contains(key)) fail(std::string("missing required key \"") + key + "\"");
    return j_.at(key);
  }
  std::string sub(const char* key) const { return path_ + "." + key; }

  double number(const char* key) const {
    const json& v = at(key);
    if (!v.is_number()) throw ConfigError(sub(key) + ": expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw ConfigError(sub(key) + ": must be finite");
    return d;
  }
  double number(const char* key, double def) const { return has(key) ? number(key) : def; }

  int integer(const char* key, int def, int lo) const {
    if (!has(key)) return def;
    const json& v = at(key);
    if (!v.is_number_integer()) throw ConfigError(sub(key) + ": expected an integer");
    const auto i = v.get<long long>();
    if (i < lo || i > 2000000000LL) throw ConfigError(sub(key) + ": must be >= " + std::to_string(lo));
    return static_cast<int>(i);
  }

  bool boolean(const char* key, bool def) const {
    if (!has(key)) return def;
    if (!at(key).is_boolean()) throw ConfigError(sub(key) + ": expected true or false");
    return at(key).get<bool>();
  }

  std::string string(const char* key) const {
    const json& v = at(key);
    if (!v.is_string()) throw ConfigError(sub(key) + ": expected a string");
    return v.get<std::string>();
  }

  std::vector<double> numbers(const char* key) const {
    const json& v = at(key);
    if (!v.is_array()) throw ConfigError(sub(key) + ": expected an array of numbers");
    std::vector<double> out;
    for (const auto& e : v) {
      if (!e.is_number()) throw ConfigError(sub(key) + ": expected an array of numbers");
      out.push_back(e.get<double>());
    }
    return out;
  }

 private:
  const json& j_;
  std::string path_;
};

Expression expression(const json& v, const std::string& path) {
  if (v.is_number()) return Expression::constant(v.get<double>());
  if (!v.is_string()) throw ConfigError(path + ": expected an expression string or a number");
  try {
    return Expression::parse(v.get<std::string>());
  } catch (const ParseError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

ConvexFunction convex(const json& j, const std::string& path) {
  const Obj o(j, path);
  const std::string kind = o.string("kind");
  try {
    if (kind == "zero") {
      o.allow({"kind"});
      return ConvexFunction::zero();
    }
    if (kind == "half_line_lower") {
      o.allow({"kind", "a"});
      return ConvexFunction::half_line_lower(o.number("a"));
    }
    if (kind == "half_line_upper") {
      o.allow({"kind", "b"});
      return ConvexFunction::half_line_upper(o.number("b"));
    }
    if (kind == "interval") {
      o.allow({"kind", "a", "b"});
      return ConvexFunction::interval(o.number("a"), o.number("b"));
    }
    if (kind == "quadratic") {
      o.allow({"kind", "c"});
      return ConvexFunction::quadratic(o.number("c"));
    }
    if (kind == "abs_power") {
      o.allow({"kind", "c", "p"});
      return ConvexFunction::abs_power(o.number("c"), o.number("p"));
    }
    if (kind == "piecewise_linear") {
      o.allow({"kind", "breakpoints", "slopes"});
      return ConvexFunction::piecewise_linear(o.numbers("breakpoints"), o.numbers("slopes"));
    }
  } catch (const DomainError& e) {
    throw ConfigError(path + ": " + e.what());
  }
  throw ConfigError(path + ".kind: unknown convex function \"" + kind + "\"");
}

DomainSpec domain(const json& j, const std::string& path) {
  const Obj o(j, path);
  const std::string kind = o.string("kind");
  try {
    if (kind == "interval") {
      o.allow({"kind", "left", "right"});
      return DomainSpec::interval(o.number("left"), o.number("right"));
    }
    if (kind == "ball") {
      o.allow({"kind", "center", "radius"});
      const auto c = o.numbers("center");
      Point center(static_cast<Eigen::Index>(c.size()));
      for (std::size_t i = 0; i < c.size(); ++i) center[static_cast<Eigen::Index>(i)] = c[i];
      return DomainSpec::ball(center, o.number("radius"));
    }
  } catch (const DomainError& e) {
    throw ConfigError(path + ": " + e.what());
  }
  throw ConfigError(path + ".kind: unknown domain \"" + kind + "\"");
}

Coefficients coefficients(const json& j, const std::string& path, int d) {
  const Obj o(j, path);
  o.allow({"drift", "diffusion", "f", "g", "h"});
  Coefficients c;
  const json& drift = o.at("drift");
  if (!drift.is_array() || static_cast<int>(drift.size()) != d)
    throw ConfigError(o.sub("drift") + ": expected an array of " + std::to_string(d) + " entries");
  for (std::size_t i = 0; i < drift.size(); ++i)
    c.drift.push_back(expression(drift[i], o.sub("drift") + "[" + std::to_string(i) + "]"));
  const json& diff = o.at("diffusion");
  if (!diff.is_array() || static_cast<int>(diff.size()) != d)
    throw ConfigError(o.sub("diffusion") + ": expected " + std::to_string(d) + " rows");
  for (std::size_t i = 0; i < diff.size(); ++i) {
    if (!diff[i].is_array() || static_cast<int>(diff[i].size()) != d)
      throw ConfigError(o.sub("diffusion") + "[" + std::to_string(i) + "]: expected " + std::to_string(d) + " entries");
    for (std::size_t k = 0; k < diff[i].size(); ++k)
      c.diffusion.push_back(
          expression(diff[i][k], o.sub("diffusion") + "[" + std::to_string(i) + "][" + std::to_string(k) + "]"));
  }
  c.f = o.has("f") ? expression(o.at("f"), o.sub("f")) : Expression::constant(0.0);
  c.g = o.has("g") ? expression(o.at("g"), o.sub("g")) : Expression::constant(0.0);
  c.h = expression(o.at("h"), o.sub("h"));
  return c;
}

AssumptionConstants constants(const json& j, const std::string& path) {
  const Obj o(j, path);
  o.allow({"alpha", "beta", "gamma", "L", "lambda", "mu"});
  AssumptionConstants k;
  k.alpha = o.number("alpha", k.alpha);
  k.beta = o.number("beta", k.beta);
  k.gamma = o.number("gamma", k.gamma);
  k.L = o.number("L", k.L);
  k.lambda = o.number("lambda", k.lambda);
  k.mu = o.number("mu", k.mu);
  return k;
}

std::shared_ptr<const ProblemSpec> preset(const json& j, const std::string& path) {
  const Obj o(j, path);
  const std::string name = o.string("name");
  if (name == "neumann_heat") {
    o.allow({"name", "horizon"});
    return std::make_shared<ProblemSpec>(presets::neumann_heat(o.number("horizon", 0.5)));
  }
  if (name == "obstacle") {
    o.allow({"name", "sigma", "horizon"});
    return std::make_shared<ProblemSpec>(presets::obstacle(o.number("sigma", 1.0), o.number("horizon", 1.0)));
  }
  if (name == "linear_decay") {
    o.allow({"name", "lambda0", "xi", "horizon"});
    return std::make_shared<ProblemSpec>(
        presets::linear_decay(o.number("lambda0", 1.0), o.number("xi", 1.0), o.number("horizon", 1.0)));
  }
  if (name == "ball_diffusion") {
    o.allow({"name", "dimension", "horizon"});
    return std::make_shared<ProblemSpec>(presets::ball_diffusion(o.integer("dimension", 2, 1), o.number("horizon", 1.0)));
  }
  throw ConfigError(path + ".name: unknown preset \"" + name + "\"");
}

std::pair<double, double> range(const Obj& o, const char* key, std::pair<double, double> def) {
  if (!o.has(key)) return def;
  const auto v = o.numbers(key);
  if (v.size() != 2 || !(v[0] < v[1])) throw ConfigError(o.sub(key) + ": expected [lo, hi] with lo < hi");
  return {v[0], v[1]};
}

}  // namespace

RunConfig parse_config(std::string_view text) {
  json root;
  try {
    root = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    // nlohmann reports the 1-based position of the offending character.
    const std::size_t off = e.byte > 0 ? e.byte - 1 : 0;
    throw ParseError("malformed JSON", off, {});
  }
  const Obj o(root, "$");
  o.allow({"version", "name", "preset", "domain", "coefficients", "phi", "psi", "horizon", "constants",
           "validation", "solver", "monte_carlo", "grid", "oracle"});
  const json& ver = o.at("version");
  if (!ver.is_number_integer() || ver.get<long long>() != kConfigVersion)
    throw ConfigError("$.version: expected " + std::to_string(kConfigVersion));

  RunConfig cfg;
  cfg.canonical = root.dump();
  if (o.has("preset")) {
    for (const char* k : {"domain", "coefficients", "phi", "psi", "horizon", "constants"})
      if (o.has(k)) throw ConfigError(std::string("$.") + k + ": not allowed together with $.preset");
    cfg.problem = preset(o.at("preset"), "$.preset");
  } else {
    const DomainSpec dom = domain(o.at("domain"), "$.domain");
    Coefficients c = coefficients(o.at("coefficients"), "$.coefficients", dom.dimension());
    const ConvexFunction phi = convex(o.at("phi"), "$.phi");
    const ConvexFunction psi = convex(o.at("psi"), "$.psi");
    const AssumptionConstants k = o.has("constants") ? constants(o.at("constants"), "$.constants") : AssumptionConstants{};
    const std::string name = o.has("name") ? o.string("name") : std::string{};
    cfg.problem = std::make_shared<ProblemSpec>(dom, std::move(c), phi, psi, o.number("horizon"), k, name);
  }

  if (o.has("validation")) {
    const Obj v(o.at("validation"), "$.validation");
    v.allow({"samples", "y_range", "z_range", "eps_list", "check_uniqueness"});
    cfg.validation.samples = v.integer("samples", cfg.validation.samples, 1);
    std::tie(cfg.validation.ranges.y_lo, cfg.validation.ranges.y_hi) =
        range(v, "y_range", {cfg.validation.ranges.y_lo, cfg.validation.ranges.y_hi});
    std::tie(cfg.validation.ranges.z_lo, cfg.validation.ranges.z_hi) =
        range(v, "z_range", {cfg.validation.ranges.z_lo, cfg.validation.ranges.z_hi});
    if (v.has("eps_list")) cfg.validation.eps_list = v.numbers("eps_list");
    cfg.validation.check_uniqueness = v.boolean("check_uniqueness", false);
  }
  if (o.has("solver")) {
    const Obj s(o.at("solver"), "$.solver");
    s.allow({"eps", "basis_degree", "implicit_tol", "implicit_max_iter", "picard_iters", "stability_cap"});
    auto& sc = cfg.mc.solver;
    sc.eps = s.number("eps", sc.eps);
    sc.basis_degree = s.integer("basis_degree", sc.basis_degree, 0);
    sc.implicit_tol = s.number("implicit_tol", sc.implicit_tol);
    sc.implicit_max_iter = s.integer("implicit_max_iter", sc.implicit_max_iter, 1);
    sc.picard_iters = s.integer("picard_iters", sc.picard_iters, 1);
    sc.stability_cap = s.number("stability_cap", sc.stability_cap);
    try {
      sc.validate();
    } catch (const PreconditionError& e) {
      throw ConfigError(std::string("$.solver: ") + e.what());
    }
  }
  if (o.has("monte_carlo")) {
    const Obj m(o.at("monte_carlo"), "$.monte_carlo");
    m.allow({"paths", "steps", "substeps"});
    cfg.mc.n_paths = m.integer("paths", cfg.mc.n_paths, 1);
    cfg.mc.n_steps = m.integer("steps", cfg.mc.n_steps, 1);
    cfg.mc.substeps = m.integer("substeps", cfg.mc.substeps, 1);
  }
  if (o.has("grid")) {
    const Obj g(o.at("grid"), "$.grid");
    g.allow({"times", "points"});
    GridSpec grid;
    grid.times = g.numbers("times");
    const json& pts = g.at("points");
    if (!pts.is_array()) throw ConfigError("$.grid.points: expected an array");
    const int d = cfg.problem->dimension();
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const std::string where = "$.grid.points[" + std::to_string(i) + "]";
      Point x(d);
      if (pts[i].is_number() && d == 1) {
        x[0] = pts[i].get<double>();
      } else if (pts[i].is_array() && static_cast<int>(pts[i].size()) == d) {
        for (int c = 0; c < d; ++c) {
          if (!pts[i][static_cast<std::size_t>(c)].is_number()) throw ConfigError(where + ": expected numbers");
          x[c] = pts[i][static_cast<std::size_t>(c)].get<double>();
        }
      } else {
        throw ConfigError(where + ": expected a point of dimension " + std::to_string(d));
      }
      grid.points.push_back(x);
    }
    if (grid.times.empty() || grid.points.empty()) throw ConfigError("$.grid: times and points must be nonempty");
    cfg.grid = grid;
  }
  if (o.has("oracle")) {
    const Obj r(o.at("oracle"), "$.oracle");
    r.allow({"tolerance", "nx", "nt", "theta"});
    cfg.oracle.tolerance = r.number("tolerance", cfg.oracle.tolerance);
    cfg.oracle.nx = r.integer("nx", cfg.oracle.nx, 2);
    cfg.oracle.nt = r.integer("nt", cfg.oracle.nt, 1);
    cfg.oracle.theta = r.number("theta", cfg.oracle.theta);
  }
  return cfg;
}

RunConfig load_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

}  // namespace pvi
